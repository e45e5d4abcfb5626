use std::process::Command;

use lm_core::domain::parse_value;
use lm_core::rational::parse_rational;
use lm_core::NumericContext;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lm(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_lm")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn program(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("lm_cli_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no {key} in {line:?}"))
}

#[test]
fn printed_values_round_trip() {
    let c = NumericContext::new(8).unwrap();
    for lit in ["0.3", "-0.3", "1000", "-7/3", "-1000", "0", "255"] {
        let r = lm(&["--porcelain", "map", "--bits", "8", lit]);
        assert_eq!(r.code, 0);
        let v = parse_value(c, field(r.stdout.trim(), "value")).unwrap();
        // Mapping the printed value again is the identity.
        let again = lm(&["--porcelain", "map", "--bits", "8", &v.to_string()]);
        assert_eq!(field(again.stdout.trim(), "value"), v.to_string());
        assert_eq!(field(again.stdout.trim(), "status"), "exact");
    }
    let q = lm(&["--porcelain", "q88", "mul", "-1.25", "3.5"]);
    let value = parse_rational(field(q.stdout.trim(), "value")).unwrap();
    let raw: i64 = field(q.stdout.trim(), "raw").parse().unwrap();
    assert_eq!(value * lm_core::rational::int(256), lm_core::rational::int(raw));
}

#[test]
fn eval_exit_codes() {
    assert_eq!(lm(&["eval", "--bits", "2", "x*y", "x=1/3", "y=2"]).stdout, "2/3\n");
    assert_eq!(lm(&["eval", "--bits", "2", "-x+1", "x=1/3"]).stdout, "2/3\n");
    assert_eq!(lm(&["eval", "--bits", "2", "x*y", "x=0.5", "y=2"]).code, 2);
    assert_eq!(lm(&["eval", "--bits", "2", "x*", "x=1"]).code, 2);
    assert_eq!(lm(&["eval", "--bits", "2", "1/(x-x)", "x=1"]).code, 2);
    let t = lm(&["eval", "--bits", "1", "--policy", "trap", "--mode", "step", "(x+y)+z", "x=1", "y=1", "z=-1"]);
    assert_eq!(t.code, 1);
    assert!(t.stderr.starts_with("trap: "));
    let both = lm(&["--porcelain", "eval", "--bits", "1", "--compare-modes", "(x+y)+z", "x=1", "y=1", "z=-1"]);
    assert_eq!(both.stdout, "mode=end value=1/1\nmode=step value=0/1\n");
}

#[test]
fn laws_cap_can_be_raised() {
    let r = lm(&["laws", "--bits", "5", "--only", "commutativity", "--cap", "4000000"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("universal: PASS"));
    assert_eq!(lm(&["laws", "--bits", "1", "--only", "frobenius"]).code, 2);
}

#[test]
fn laws_porcelain_lists_every_counterexample() {
    let r = lm(&["--porcelain", "laws", "--bits", "2", "--only", "associativity"]);
    let head = r.stdout.lines().next().unwrap();
    let count: usize = field(head, "counterexamples").parse().unwrap();
    assert!(count > 10);
    assert_eq!(r.stdout.lines().filter(|l| l.starts_with("record=counterexample")).count(), count);
    let human = lm(&["laws", "--bits", "2", "--only", "associativity"]);
    assert_eq!(human.stdout.lines().filter(|l| l.starts_with("  (")).count(), 10);
    assert!(human.stdout.lines().nth(3).unwrap().starts_with("  (9/3, 9/3, -9/3)"));
}

#[test]
fn q88_traps_and_notices() {
    let t = lm(&["--porcelain", "q88", "mul", "-128", "-1"]);
    assert_eq!(t.code, 1);
    assert_eq!(t.stdout, "error=trap op=mul wide=32768\n");
    let big = lm(&["q88", "add", "200", "0"]);
    assert_eq!(big.code, 1);
    assert!(big.stderr.contains("convert"));
    let floored = lm(&["q88", "add", "0.001", "0"]);
    assert_eq!(floored.stdout, "0.0 (raw 0)\n");
    assert!(floored.stderr.starts_with("note: "));
}

#[test]
fn deriv_variants() {
    let r = lm(&["deriv", "--bits", "8", "0.3*x", "--sweep", "--from", "250", "--count", "6"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.ends_with("naive zeros: 5 of 6\n"), "{}", r.stdout);
    let edge = lm(&["--porcelain", "deriv", "--bits", "1", "x", "1", "--naive"]);
    assert_eq!(edge.stdout, "x=1/1 mapped=1/1 mapped_value=1/1 naive=edge\n");
    assert_eq!(lm(&["deriv", "--bits", "8", "x/2", "0"]).code, 2);
    assert_eq!(lm(&["deriv", "--bits", "8", "x*y", "0"]).code, 2);
    assert_eq!(lm(&["deriv", "--bits", "8", "x"]).code, 2);
    assert_eq!(lm(&["deriv", "--bits", "8", "t*t*t", "2"]).stdout, "mapped 3060/255 (12/1)\n");
}

#[test]
fn vm_commands() {
    let counter = program("counter2.lmvm", "#bits 1\n#regs 2\nADD r0, r0, r1\nJMP 0\n");
    let d = lm(&["vm", "decide", &counter, "--reg", "r0=-1", "--reg", "r1=1"]);
    assert_eq!(d.stdout, "CYCLE prefix=3 period=2\n");
    let u = lm(&["vm", "decide", &counter, "--budget", "1"]);
    assert_eq!((u.code, u.stdout.as_str()), (1, "UNDECIDED steps=1\n"));
    let run = lm(&["vm", "run", &counter, "--budget", "5", "--reg", "r1=1"]);
    assert_eq!((run.code, run.stdout.as_str()), (1, "RUNNING steps=5 pc=1 regs=1,1\n"));

    let trap = program("trap.lmvm", "#bits 1\n#regs 1\n#policy trap\nLOADI r0, 1\nADD r0, r0, r0\nHALT\n");
    let t = lm(&["--porcelain", "vm", "run", &trap]);
    assert_eq!((t.code, t.stdout.as_str()), (1, "outcome=trapped steps=2 op=add value=2/1 bound=1\n"));
    let d = lm(&["vm", "decide", &trap]);
    assert_eq!(d.code, 0);
    assert!(d.stdout.starts_with("TRAPPED steps=2"));

    let halt = program("halt2.lmvm", "#bits 1\n#regs 1\nLOADI r0, -1\nHALT\n");
    assert_eq!(lm(&["--porcelain", "vm", "run", &halt]).stdout, "outcome=halted steps=2 pc=1 regs=-1\n");
    assert_eq!(lm(&["vm", "run", &halt, "--reg", "r3=0"]).code, 2);
    assert_eq!(lm(&["vm", "run", &halt, "--reg", "r0=5"]).code, 2);
    assert_eq!(lm(&["vm", "size", "/nonexistent/x.lmvm"]).code, 2);
    let bad = program("bad.lmvm", "#bits 1\nHALT\n");
    assert_eq!(lm(&["vm", "size", &bad]).code, 2);
}
