#![allow(dead_code)]

use swiss_csd::{ModelId, ScoreTable, WinRateTensor};

pub fn ids(n: usize) -> Vec<ModelId> {
    (0..n)
        .map(|i| ModelId::new(format!("m{i}")).unwrap())
        .collect()
}

pub fn named(names: &[&str]) -> Vec<ModelId> {
    names.iter().map(|n| ModelId::new(*n).unwrap()).collect()
}

pub fn rounds(k: usize) -> Vec<String> {
    (0..k).map(|r| format!("r{r}")).collect()
}

/// Lower index always beats higher index.
pub fn ladder(m: usize, k: usize) -> WinRateTensor {
    WinRateTensor::from_fn(ids(m), rounds(k), |_, _, _| 1.0).unwrap()
}

/// Tensor from a per-round strength ordering: `strength[k][i]` higher wins, equal is a coin flip.
pub fn from_strengths(models: Vec<ModelId>, strength: &[Vec<i32>]) -> WinRateTensor {
    WinRateTensor::from_fn(models, rounds(strength.len()), |i, j, k| {
        match strength[k][i].cmp(&strength[k][j]) {
            std::cmp::Ordering::Greater => 1.0,
            std::cmp::Ordering::Less => 0.0,
            std::cmp::Ordering::Equal => 0.5,
        }
    })
    .unwrap()
}

/// Eight models over four rounds. `generalist` beats every mediocre model in
/// every round; `specialist` loses every round-1 match and wins every match
/// afterwards; the six mediocre models keep a fixed order.
pub fn specialist_fixture() -> WinRateTensor {
    let names = [
        "generalist",
        "med1",
        "med2",
        "med3",
        "med4",
        "med5",
        "med6",
        "specialist",
    ];
    let mut strength = Vec::new();
    for k in 0..4 {
        let mut s: Vec<i32> = (0..8).map(|i| 100 - i).collect();
        s[7] = if k == 0 { 0 } else { 1000 };
        strength.push(s);
    }
    from_strengths(named(&names), &strength)
}

/// Ten models, twelve single-dataset rounds, strict total order everywhere:
/// model `i` scores `90 − 2i` on every dataset.
pub fn perturbation_fixture() -> (ScoreTable, Vec<String>) {
    let names: Vec<String> = (0..10).map(|i| format!("model{i:02}")).collect();
    let datasets: Vec<String> = (1..=12).map(|d| format!("bench{d:02}")).collect();
    let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![90.0 - 2.0 * i as f64; 12]).collect();
    (
        ScoreTable::from_complete(&names, &datasets, &rows).unwrap(),
        datasets,
    )
}
