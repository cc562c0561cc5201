use gct_web::{evaluate, fuse, ghz};

const CHAIN: &str = "gct-diagram 1
signature qucirc
inputs Q
outputs Q
node 0 spider white Q 1 1 phase angle:0.5
node 1 spider white Q 1 1 phase angle:0.25
wire in:0 0.0
wire 0.0 1.0
wire 1.0 out:0
end
";

#[test]
fn fusion_merges_the_chain() {
    let out = fuse(CHAIN).unwrap();
    assert!(out.starts_with("# 2 nodes -> 1"), "{out}");
    assert!(out.contains("phase angle:0.75"), "{out}");
    // The fused diagram still evaluates to the same phase gate.
    let body: String = out.lines().skip(1).map(|l| format!("{l}\n")).collect();
    assert_eq!(evaluate(&body, "qubit").unwrap(), evaluate(CHAIN, "qubit").unwrap());
}

#[test]
fn ghz_even_parity_for_xxx() {
    let out = ghz("0,0,0").unwrap();
    assert!(out.contains("parity even 1 odd 0"), "{out}");
    assert!(out.contains("no local hidden state fits"));
    assert!(ghz("0,90,90").unwrap().contains("parity even 0 odd 1"));
    assert!(ghz("0,x").is_err());
    assert!(ghz("0").is_err());
}
