use toruslab::analysis::{estimate_indices_from_scan, IndexOptions};
use toruslab::lattice::{Norm, Window};
use toruslab::report;
use toruslab::scan::{scan, scan_serial, DEFAULT_ZERO_CAP};
use toruslab::symbol::parse_symbol;

fn render(name: &str, w: &Window, serial: bool, threads: usize) -> String {
    let sym = parse_symbol(name).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let sc = pool.install(|| {
        if serial {
            scan_serial(&sym, w, DEFAULT_ZERO_CAP)
        } else {
            scan(&sym, w, DEFAULT_ZERO_CAP)
        }
    });
    let opts = IndexOptions { r: Some(1.0), ..Default::default() };
    report::to_string(&report::index_report(&estimate_indices_from_scan(&sym, &sc, &opts).unwrap()))
}

#[test]
fn parallel_and_serial_reports_are_identical() {
    let cases = [
        ("laplacian:2", Window::l1(2, 300).unwrap()),
        ("heat:1", Window::l1(2, 256).unwrap()),
        ("vf:alpha=sqrt:2", Window::new(2, 400, Norm::L2).unwrap()),
        ("vf:alpha=rat:3/2", Window::l1(2, 500).unwrap()),
        ("wave2d:eta=sqrt:3", Window::l1(2, 200).unwrap()),
        ("logdamp", Window::l1(1, 200).unwrap()),
    ];
    for (name, w) in cases {
        let serial = render(name, &w, true, 1);
        for threads in [1, 2, 3, 8] {
            assert_eq!(serial, render(name, &w, false, threads), "{name} with {threads} threads");
        }
    }
}
