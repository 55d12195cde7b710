//! Small dense linear solves for the fitting pipeline.

/// Solution of a 4x4 system together with an infinity-norm condition
/// number of the matrix.
#[derive(Debug, Clone, Copy)]
pub struct Solve4 {
    pub x: [f64; 4],
    pub condition_number: f64,
}

fn inf_norm(m: &[[f64; 4]; 4]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solve `a x = b` by Gauss-Jordan elimination with partial pivoting,
/// carrying the identity along to obtain the inverse for the condition
/// number. Returns `None` when a pivot vanishes.
pub fn solve4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<Solve4> {
    let norm_a = inf_norm(a);
    // Augmented [a | b | I].
    let mut m = [[0.0f64; 9]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[..4].copy_from_slice(&a[i]);
        row[4] = b[i];
        row[4 + 1 + i] = 1.0;
    }
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&r1, &r2| m[r1][col].abs().total_cmp(&m[r2][col].abs()))
            .unwrap();
        if m[pivot_row][col] == 0.0 {
            return None;
        }
        m.swap(col, pivot_row);
        let pivot = m[col][col];
        for entry in &mut m[col] {
            *entry /= pivot;
        }
        let pivot_row_values = m[col];
        for (row, values) in m.iter_mut().enumerate() {
            if row != col && values[col] != 0.0 {
                let factor = values[col];
                for (v, pv) in values.iter_mut().zip(&pivot_row_values) {
                    *v -= factor * pv;
                }
            }
        }
    }
    let x = [m[0][4], m[1][4], m[2][4], m[3][4]];
    let mut inv = [[0.0f64; 4]; 4];
    for i in 0..4 {
        inv[i].copy_from_slice(&m[i][5..9]);
    }
    let cond = norm_a * inf_norm(&inv);
    if !cond.is_finite() {
        return None;
    }
    Some(Solve4 {
        x,
        condition_number: cond,
    })
}
