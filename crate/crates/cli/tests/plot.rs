use ringtrap_cli::plot::{contour_segments, fmt_tick, ticks};

#[test]
fn circle_contour_radius() {
    let g: Vec<f64> = (0..81).map(|i| -2.0 + 4.0 * i as f64 / 80.0).collect();
    let v: Vec<Vec<f64>> = g.iter().map(|x| g.iter().map(|y| x * x + y * y).collect()).collect();
    let segs = contour_segments(&g, &g, &v, 1.0);
    assert!(!segs.is_empty());
    for s in segs {
        for (x, y) in s {
            assert!(((x * x + y * y).sqrt() - 1.0).abs() < 2e-3);
        }
    }
}

#[test]
fn tick_steps() {
    let t = ticks(0.0, 1.0);
    assert_eq!(t.len(), 6);
    assert!(t.iter().enumerate().all(|(i, v)| (v - 0.2 * i as f64).abs() < 1e-12));
    assert_eq!(ticks(0.0, 320.0).last(), Some(&300.0));
    assert_eq!(fmt_tick(250.0), "250");
}
