//! Shared fixtures for the criterion benches.

use tvcert::tvgrid::Subsampling;
use tvcert::{make_phantom, ForwardBlurSubsample, GridImage, PhantomKind, SimpleRadialSpec};

/// Radial specs of increasing size, all well separated at `sigma = 0.15`.
pub fn specs() -> Vec<(&'static str, SimpleRadialSpec)> {
    vec![
        ("n1", SimpleRadialSpec::new(vec![1.0], vec![1.0]).unwrap()),
        (
            "n3",
            SimpleRadialSpec::new(vec![0.6, 1.3, 2.0], vec![1.0, -2.0, 0.5]).unwrap(),
        ),
    ]
}

/// Blurred disk observed on an `obs x obs` grid, subsampled by 2.
pub fn disk_problem(obs: usize) -> (ForwardBlurSubsample, GridImage) {
    let op = ForwardBlurSubsample::new(1.0, 2, obs, obs, 1.0, Subsampling::Point).unwrap();
    let (rows, cols) = op.fine_dims();
    let u0 = make_phantom(
        PhantomKind::Disk {
            radius: 0.4 * obs as f64,
        },
        rows,
        cols,
        1.0,
    )
    .unwrap();
    let y = op.forward(&u0).unwrap();
    (op, y)
}
