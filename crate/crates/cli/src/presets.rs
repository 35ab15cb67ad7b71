//! Built-in scenarios `fig1` .. `fig10`.

pub const COUNT: u8 = 10;

const PRESETS: [(&str, &str); COUNT as usize] = [
    (
        "Y2 and Ltilde, 3D exact resonance, vacuum",
        "model = cavity3d-symmetric
nu = 50/3
zeros = 3
measures = Y2, Ltilde
",
    ),
    (
        "Ic, 3D exact resonance, vacuum and high temperature",
        "model = cavity3d-symmetric
nu = 50/3
theta1 = 1, 140
theta3 = 1, 140/3
zeros = 3
measures = Ic
",
    ),
    (
        "Ltilde and Y2, 3D exact resonance, high temperature",
        "model = cavity3d-symmetric
nu = 50/3
theta1 = 140
theta3 = 140/3
zeros = 3
measures = Ltilde, Y2
",
    ),
    (
        "Y, Ltilde and Jc, 3D detuned resonance, vacuum",
        "model = cavity3d-asymmetric
nu = 100
end = 4
measures = Y, Ltilde, Jc
",
    ),
    (
        "Y and Ltilde, 3D detuned resonance, vacuum and high temperature",
        "model = cavity3d-asymmetric
nu = 100
theta1 = 1, 140
theta3 = 1, 140/3
end = 4
measures = Y, Ltilde
",
    ),
    (
        "Y for modes 1-3 and 3-5 versus kappa, 1D cavity p = 2, vacuum",
        "model = cavity1d-p2
grid = kappa
end = 0.99
pairs = 1-3, 3-5
measures = Y
",
    ),
    (
        "Y, Jc, Ltilde, Y2 and Z for modes 1-3 versus kappa, 1D cavity p = 2, vacuum",
        "model = cavity1d-p2
grid = kappa
end = 0.99
pairs = 1-3
measures = Y, Jc, Ltilde, Y2, Z
",
    ),
    (
        "Y for modes 1-2, 1D cavity p = 1, Fock and squeezed first mode",
        "model = cavity1d-p1
pairs = 1-2
state = fock, squeezed
nu1 = 1, 50, 1000
end = 6
measures = Y
",
    ),
    (
        "mean photon numbers of modes 1 and 2, 1D cavity p = 1, Fock |1>",
        "model = cavity1d-p1
pairs = 1-2
state = fock
nu1 = 1
end = 4
measures = nbar
",
    ),
    (
        "Ltilde and Z for modes 1-2, 1D cavity p = 1, squeezed first mode",
        "model = cavity1d-p1
pairs = 1-2
state = squeezed
nu1 = 1, 50, 1000
end = 6
measures = Ltilde, Z
",
    ),
];

/// Configuration text of preset `fig{n}`, `1 ≤ n ≤ COUNT`.
pub fn text(n: u8) -> &'static str {
    PRESETS[n as usize - 1].1
}

/// One-line description of preset `fig{n}`.
pub fn description(n: u8) -> &'static str {
    PRESETS[n as usize - 1].0
}

/// Human-readable listing of every preset with its parameters.
pub fn listing() -> String {
    let mut out = String::new();
    for n in 1..=COUNT {
        out.push_str(&format!("fig{n}: {}\n", description(n)));
        for line in text(n).lines() {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}
