use super::aoi::AgeAccumulator;
use super::polygons::PolygonTally;
use super::trigger::Trigger;
use super::{DistortionReport, SamplePacket, SimConfig, SimRun};
use crate::error::Result;
use crate::interpolation::{
    oracle_reconstruction, plain_reconstruction, reconstruct_with_interpolation, InterpolationMode, InterpolationPlan,
};
use crate::stochastic::rng::{exponential, stream_rng, Stream};
use crate::stochastic::{generate_poisson_path, integrate_difference, DifferenceAccumulator, ProcessPath};

/// Runs one simulation and returns its report.
///
/// Packets are not retained unless interpolation is requested, so long runs
/// use memory proportional to the number of source events only.
pub fn simulate(config: &SimConfig) -> Result<DistortionReport> {
    if config.interpolation == InterpolationMode::Off {
        Ok(run(config, false)?.report)
    } else {
        Ok(simulate_recorded(config)?.report)
    }
}

/// Runs one simulation and keeps the path, packets and scored reconstruction.
pub fn simulate_recorded(config: &SimConfig) -> Result<SimRun> {
    let mut out = run(config, true)?;
    let horizon = config.horizon;
    let reconstruction = match config.interpolation {
        InterpolationMode::Off => plain_reconstruction(&out.packets, horizon)?,
        InterpolationMode::Oracle => oracle_reconstruction(&out.path, &out.packets, horizon)?,
        mode => {
            let plan = InterpolationPlan { mode, seed: config.seed };
            reconstruct_with_interpolation(&out.packets, &plan, horizon)?
        }
    };
    if config.interpolation != InterpolationMode::Off {
        let area = integrate_difference(&out.path.to_step_trace(), &reconstruction, horizon)?;
        out.report.theta_hat = area.signed / horizon;
        out.report.abs_theta_hat = area.absolute / horizon;
    }
    Ok(SimRun { report: out.report, path: out.path, packets: out.packets, reconstruction })
}

struct RawRun {
    report: DistortionReport,
    path: ProcessPath,
    packets: Vec<SamplePacket>,
}

fn run(config: &SimConfig, record: bool) -> Result<RawRun> {
    config.validate()?;
    let horizon = config.horizon;
    let path = generate_poisson_path(config.lambda, horizon, config.seed)?;
    let arrivals = path.arrivals();
    let mut service_rng = stream_rng(config.seed, Stream::Service);
    let mut trigger = Trigger::new(config.policy);
    let mut tally = PolygonTally::new(config.policy);
    let mut age = AgeAccumulator::new();
    let mut distortion = DifferenceAccumulator::new(0.0);

    // arrivals already integrated, level shown at the monitor
    let mut integrated = 0usize;
    let mut shown = 0i64;
    // arrivals at or before the latest sample
    let mut counted = 0usize;
    let mut idle_at = 0.0_f64;
    let (mut samples, mut delivered, mut backlog) = (0u64, 0u64, 0u64);
    let (mut wait_sum, mut delay_sum) = (0.0, 0.0);
    let mut packets = Vec::new();

    while let Some(t) = trigger.next(arrivals, idle_at, horizon) {
        counted += arrivals[counted..].partition_point(|&s| s <= t);
        let service = loop {
            let v = exponential(&mut service_rng, config.mu);
            if v > 0.0 {
                break v;
            }
        };
        let start = t.max(idle_at);
        let delivery = start + service;
        idle_at = delivery;
        samples += 1;
        let packet = SamplePacket {
            index: samples,
            sample_time: t,
            value: counted as u64,
            service_start: start,
            wait: start - t,
            service,
            delivery_time: delivery,
        };
        tally.add(arrivals, &packet, horizon);
        if delivery <= horizon {
            delivered += 1;
            wait_sum += packet.wait;
            delay_sum += packet.system_time();
            // arrivals at the delivery instant are integrated first
            while integrated < arrivals.len() && arrivals[integrated] <= delivery {
                distortion.advance(arrivals[integrated], integrated as i64 - shown);
                integrated += 1;
            }
            distortion.advance(delivery, integrated as i64 - shown);
            shown = counted as i64;
            age.deliver(delivery, t);
        } else {
            backlog += 1;
        }
        if record {
            packets.push(packet);
        }
    }
    for &s in &arrivals[integrated..] {
        distortion.advance(s, integrated as i64 - shown);
        integrated += 1;
    }
    distortion.advance(horizon, integrated as i64 - shown);

    let area = distortion.area();
    let mean = |sum: f64| (delivered > 0).then(|| sum / delivered as f64);
    let report = DistortionReport {
        policy: config.policy,
        interpolation: config.interpolation,
        lambda: config.lambda,
        mu: config.mu,
        horizon,
        seed: config.seed,
        theta_hat: area.signed / horizon,
        abs_theta_hat: area.absolute / horizon,
        mean_delay: mean(delay_sum),
        mean_wait: mean(wait_sum),
        mean_aoi: age.mean(horizon),
        sample_count: samples,
        delivered,
        backlog,
        unstable: backlog > config.unstable_backlog,
        area: tally.finish(arrivals, horizon),
    };
    Ok(RawRun { report, path, packets })
}
