use super::types::GridCase;

/// Bus-to-line incidence pair (A⁺, A⁻), dense, bus-major.
///
/// `A⁺[i,l] = A⁻[i,l] = 1` when bus `i` sends line `l`; `A⁺[i,l] = -1`,
/// `A⁻[i,l] = 0` when it receives; zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceMatrices {
    pub buses: usize,
    pub lines: usize,
    plus: Vec<i8>,
    minus: Vec<i8>,
}

impl IncidenceMatrices {
    pub fn a_plus(&self, bus: usize, line: usize) -> i8 {
        self.plus[bus * self.lines + line]
    }

    pub fn a_minus(&self, bus: usize, line: usize) -> i8 {
        self.minus[bus * self.lines + line]
    }

    pub fn plus_column(&self, line: usize) -> Vec<i8> {
        (0..self.buses).map(|i| self.a_plus(i, line)).collect()
    }

    pub fn minus_column(&self, line: usize) -> Vec<i8> {
        (0..self.buses).map(|i| self.a_minus(i, line)).collect()
    }

    pub fn plus_row(&self, bus: usize) -> &[i8] {
        &self.plus[bus * self.lines..(bus + 1) * self.lines]
    }

    pub fn minus_row(&self, bus: usize) -> &[i8] {
        &self.minus[bus * self.lines..(bus + 1) * self.lines]
    }
}

pub fn incidence(case: &GridCase) -> IncidenceMatrices {
    let idx = case.index();
    let (nb, nl) = (case.buses.len(), case.lines.len());
    let mut plus = vec![0i8; nb * nl];
    let mut minus = vec![0i8; nb * nl];
    for l in 0..nl {
        let (f, t) = (idx.line_from[l], idx.line_to[l]);
        if f < nb {
            plus[f * nl + l] = 1;
            minus[f * nl + l] = 1;
        }
        if t < nb {
            plus[t * nl + l] = -1;
        }
    }
    IncidenceMatrices {
        buses: nb,
        lines: nl,
        plus,
        minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::types::*;

    fn ring(n_extra_isolated: usize) -> GridCase {
        let bus = |id: &str| Bus {
            id: id.into(),
            kind: BusKind::Ac,
            base_kv: 1.0,
            v_min_sq: 0.9,
            v_max_sq: 1.1,
            shunt_g: 0.0,
            shunt_b: 0.0,
            p_load: 0.0,
            q_load: 0.0,
        };
        let line = |id: &str, f: &str, t: &str| Line {
            id: id.into(),
            kind: LineKind::Ac,
            from_bus: f.into(),
            to_bus: t.into(),
            r: 0.0,
            x: 0.1,
            capacity_sq: 1.0,
            b_min: None,
            b_max: None,
        };
        let mut buses = vec![bus("1"), bus("2"), bus("3")];
        for k in 0..n_extra_isolated {
            buses.push(bus(&format!("iso{k}")));
        }
        GridCase {
            name: "ring".into(),
            s_base: 100.0,
            voll: 1.0,
            buses,
            lines: vec![line("a", "1", "2"), line("b", "2", "3"), line("c", "3", "1")],
            converters: vec![],
            generators: vec![],
            wind_farms: vec![],
        }
    }

    #[test]
    fn single_line_columns() {
        let m = incidence(&ring(0));
        assert_eq!(m.plus_column(0), vec![1, -1, 0]);
        assert_eq!(m.minus_column(0), vec![1, 0, 0]);
    }

    #[test]
    fn isolated_bus_has_zero_rows() {
        let m = incidence(&ring(1));
        assert!(m.plus_row(3).iter().all(|&v| v == 0));
        assert!(m.minus_row(3).iter().all(|&v| v == 0));
    }

    #[test]
    fn ring_columns_by_hand() {
        let m = incidence(&ring(0));
        // a: 1->2, b: 2->3, c: 3->1
        let expected_plus = [[1, -1, 0], [0, 1, -1], [-1, 0, 1]];
        let expected_minus = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
        for l in 0..3 {
            assert_eq!(m.plus_column(l), expected_plus[l].to_vec());
            assert_eq!(m.minus_column(l), expected_minus[l].to_vec());
            assert_eq!(m.plus_column(l).iter().map(|&v| v as i32).sum::<i32>(), 0);
            assert_eq!(m.minus_column(l).iter().map(|&v| v as i32).sum::<i32>(), 1);
        }
    }
}
