//! Small hand-built networks shared by unit tests.

use crate::grid::{Bus, BusKind, Converter, Generator, GridCase, Line, LineKind, TurbineGroup, WindFarm};

pub(crate) fn ac_bus(id: &str, p_load: f64, q_load: f64) -> Bus {
    Bus {
        id: id.into(),
        kind: BusKind::Ac,
        base_kv: 110.0,
        v_min_sq: 0.81,
        v_max_sq: 1.21,
        shunt_g: 0.0,
        shunt_b: 0.0,
        p_load,
        q_load,
    }
}

pub(crate) fn bus_of(kind: BusKind, id: &str) -> Bus {
    let (lo, hi) = if kind == BusKind::Dc { (8.0, 10.0) } else { (0.81, 1.21) };
    Bus {
        kind,
        v_min_sq: lo,
        v_max_sq: hi,
        ..ac_bus(id, 0.0, 0.0)
    }
}

pub(crate) fn line(id: &str, kind: LineKind, from: &str, to: &str, r: f64, x: f64) -> Line {
    Line {
        id: id.into(),
        kind,
        from_bus: from.into(),
        to_bus: to.into(),
        r,
        x,
        capacity_sq: 100.0,
        b_min: None,
        b_max: None,
    }
}

pub(crate) fn generator(id: &str, bus: &str, c1: f64, c2: f64) -> Generator {
    Generator {
        id: id.into(),
        bus: bus.into(),
        p_min: 0.0,
        p_max: 5.0,
        q_min: -5.0,
        q_max: 5.0,
        cost_c0: 0.0,
        cost_c1: c1,
        cost_c2: c2,
    }
}

pub(crate) fn case_of(name: &str, buses: Vec<Bus>, lines: Vec<Line>, generators: Vec<Generator>) -> GridCase {
    let voll = GridCase::default_voll(&generators);
    GridCase {
        name: name.into(),
        s_base: 100.0,
        voll,
        buses,
        lines,
        converters: vec![],
        generators,
        wind_farms: vec![],
    }
}

pub(crate) fn two_bus(r: f64, x: f64, p: f64, q: f64) -> GridCase {
    case_of(
        "two-bus",
        vec![ac_bus("1", 0.0, 0.0), ac_bus("2", p, q)],
        vec![line("L", LineKind::Ac, "1", "2", r, x)],
        vec![generator("G", "1", 10.0, 1.0)],
    )
}

pub(crate) fn three_bus_star(p2: f64, p3: f64) -> GridCase {
    case_of(
        "three-bus-star",
        vec![ac_bus("1", 0.0, 0.0), ac_bus("2", p2, 0.25 * p2), ac_bus("3", p3, 0.25 * p3)],
        vec![
            line("L12", LineKind::Ac, "1", "2", 0.02, 0.08),
            line("L13", LineKind::Ac, "1", "3", 0.03, 0.12),
        ],
        vec![generator("G", "1", 10.0, 1.0)],
    )
}

/// AC bus A1 with a generator feeds A2 through an AC line and in parallel
/// through a point-to-point DC link of the given kind.
pub(crate) fn hybrid(kind: LineKind) -> GridCase {
    let mut case = case_of(
        "hybrid",
        vec![
            ac_bus("A1", 0.0, 0.0),
            ac_bus("A2", 0.8, 0.2),
            bus_of(BusKind::Pc, "P1"),
            bus_of(BusKind::Dc, "D1"),
            bus_of(BusKind::Dc, "D2"),
            bus_of(BusKind::Pc, "P2"),
        ],
        vec![
            line("L", LineKind::Ac, "A1", "A2", 0.02, 0.1),
            line("T1", LineKind::PcTransformer, "P1", "A1", 0.002, 0.02),
            line("V1", LineKind::VscConverter, "D1", "P1", 0.001, 0.0),
            line("DL", kind, "D1", "D2", 0.01, 0.0),
            line("V2", LineKind::VscConverter, "D2", "P2", 0.001, 0.0),
            line("T2", LineKind::PcTransformer, "P2", "A2", 0.002, 0.02),
        ],
        vec![generator("G", "A1", 10.0, 1.0)],
    );
    case.converters = ["1", "2"]
        .iter()
        .map(|k| Converter {
            id: format!("C{k}"),
            pc_bus: format!("P{k}"),
            dc_bus: format!("D{k}"),
            r_shunt: 1000.0,
            m_sq_min: 0.25,
            m_sq_max: 1.0,
            r_sw: None,
        })
        .collect();
    case
}

/// Generator at bus 1 feeding a load at bus 2; a wind farm at bus 2 with
/// no turbines, so its limits come only from scenarios.
pub(crate) fn two_bus_wind(load: f64) -> GridCase {
    let mut case = two_bus(0.01, 0.05, load, 0.3 * load);
    case.wind_farms.push(WindFarm {
        id: "W".into(),
        bus: "2".into(),
        turbines: vec![TurbineGroup {
            model: "test".into(),
            count: 1,
        }],
        power_factor_min: 0.95,
        wake_loss: 0.0,
        cost_c1: 1.0,
    });
    case
}

/// The hybrid AC/DC test network with a farm on the receiving AC bus.
pub(crate) fn hybrid_wind() -> GridCase {
    let mut case = hybrid(LineKind::DcBi);
    case.wind_farms.push(WindFarm {
        id: "W".into(),
        bus: "A2".into(),
        turbines: vec![TurbineGroup {
            model: "test".into(),
            count: 1,
        }],
        power_factor_min: 0.95,
        wake_loss: 0.0,
        cost_c1: 1.0,
    });
    case
}
