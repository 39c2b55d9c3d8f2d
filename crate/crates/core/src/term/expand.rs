use super::{BinOp, Term, UnOp};

fn c(v: u64) -> Term {
    Term::int(v)
}

fn add(a: Term, b: Term) -> Term {
    Term::add(a, b)
}

fn sub(a: Term, b: Term) -> Term {
    Term::monus(a, b)
}

fn mul(a: Term, b: Term) -> Term {
    Term::mul(a, b)
}

fn div(a: Term, b: Term) -> Term {
    Term::div(a, b)
}

fn p2(e: Term) -> Term {
    Term::pow2(e)
}

/// a mod b = a - b * floor(a / b)
fn p_mod(a: Term, b: Term) -> Term {
    sub(a.clone(), mul(b.clone(), div(a, b)))
}

/// a^b = 2^{(ab+a+1)b} mod (2^{ab+a+1} - a), with 2^x and (2^x)^b short-cut.
fn p_pow(a: Term, b: Term) -> Term {
    match a {
        Term::Const(ref v) if *v == 2 => p2(b),
        Term::Un(UnOp::Pow2, e) => p2(mul(*e, b)),
        a => {
            let l = add(mul(a.clone(), b.clone()), add(a.clone(), c(1)));
            p_mod(p2(mul(l.clone(), b)), sub(p2(l), a))
        }
    }
}

fn p_absdiff(a: Term, b: Term) -> Term {
    add(sub(a.clone(), b.clone()), sub(b, a))
}

fn p_min(a: Term, b: Term) -> Term {
    div(sub(add(a.clone(), b.clone()), p_absdiff(a, b)), c(2))
}

/// C(a,b) = floor((2^{a+1}+1)^a / 2^{(a+1)b}) mod 2^{a+1}
fn p_binom(a: Term, b: Term) -> Term {
    let s = add(a.clone(), c(1));
    let top = p_pow(add(p2(s.clone()), c(1)), a);
    p_mod(div(top, p2(mul(s.clone(), b))), p2(s))
}

/// gcd(a,b) = (floor(5^{ab(ab+a+b)} / ((5^{a^2 b}-1)(5^{ab^2}-1))) mod 5^{ab}) - 1
fn p_gcd(a: Term, b: Term) -> Term {
    let five = |e: Term| p_pow(c(5), e);
    let ab = mul(a.clone(), b.clone());
    let num = five(mul(ab.clone(), add(add(ab.clone(), a.clone()), b.clone())));
    let den = mul(
        sub(five(mul(mul(a.clone(), a.clone()), b.clone())), c(1)),
        sub(five(mul(a, mul(b.clone(), b))), c(1)),
    );
    sub(p_mod(div(num, den), five(ab)), c(1))
}

/// nu2(n) = floor((gcd(n, 2^n)^{n+1} mod (2^{n+1}-1)^2) / (2^{n+1}-1))
fn p_nu2(n: Term) -> Term {
    let n1 = add(n.clone(), c(1));
    let m = sub(p2(n1.clone()), c(1));
    let g = p_gcd(n.clone(), p2(n));
    div(p_mod(p_pow(g, n1), mul(m.clone(), m.clone())), m)
}

/// n! = floor(r^n / C(r, n)) with r = 8^{n^2}
fn p_fact(n: Term) -> Term {
    let e = mul(c(3), mul(n.clone(), n.clone()));
    let r = p2(e.clone());
    div(p2(mul(e, n.clone())), p_binom(r, n))
}

fn p_hw(n: Term) -> Term {
    p_nu2(p_binom(mul(c(2), n.clone()), n))
}

/// Rewrites every sugar node into the five base operations.
pub fn expand_sugar(t: &Term) -> Term {
    match t {
        Term::Const(_) | Term::Var(_) => t.clone(),
        Term::Bin(op, l, r) => {
            let (l, r) = (expand_sugar(l), expand_sugar(r));
            match op {
                BinOp::Add | BinOp::Monus | BinOp::Mul | BinOp::DivFloor => Term::bin(*op, l, r),
                BinOp::Mod => p_mod(l, r),
                BinOp::Pow => p_pow(l, r),
                BinOp::AbsDiff => p_absdiff(l, r),
                BinOp::Min => p_min(l, r),
                BinOp::Binom => p_binom(l, r),
                BinOp::Gcd => p_gcd(l, r),
            }
        }
        Term::Un(op, a) => {
            let a = expand_sugar(a);
            match op {
                UnOp::Pow2 => p2(a),
                UnOp::Fact => p_fact(a),
                UnOp::Nu2 => p_nu2(a),
                UnOp::Hw => p_hw(a),
            }
        }
    }
}
