use super::{BinOp, Term, UnOp};

const SUM: u8 = 1;
const PROD: u8 = 2;
const POW: u8 = 3;
const ATOM: u8 = 4;

fn level(t: &Term) -> u8 {
    match t {
        Term::Const(_) | Term::Var(_) => ATOM,
        Term::Bin(BinOp::Add | BinOp::Monus, ..) => SUM,
        Term::Bin(BinOp::Mul | BinOp::DivFloor | BinOp::Mod, ..) => PROD,
        Term::Bin(BinOp::Pow, ..) | Term::Un(UnOp::Pow2, _) => POW,
        // function-call syntax
        Term::Bin(..) | Term::Un(..) => ATOM,
    }
}

fn write_at(t: &Term, min_level: u8, out: &mut String) {
    if level(t) < min_level {
        out.push('(');
        write(t, out);
        out.push(')');
    } else {
        write(t, out);
    }
}

fn write(t: &Term, out: &mut String) {
    match t {
        Term::Const(v) => out.push_str(&v.to_string()),
        Term::Var(name) => out.push_str(name),
        Term::Bin(op @ (BinOp::Add | BinOp::Monus), l, r) => {
            write_at(l, SUM, out);
            out.push_str(if *op == BinOp::Add { " + " } else { " - " });
            write_at(r, PROD, out);
        }
        Term::Bin(op @ (BinOp::Mul | BinOp::DivFloor | BinOp::Mod), l, r) => {
            write_at(l, PROD, out);
            out.push_str(match op {
                BinOp::Mul => " * ",
                BinOp::DivFloor => " / ",
                _ => " % ",
            });
            write_at(r, POW, out);
        }
        Term::Bin(BinOp::Pow, base, exp) => {
            if matches!(base.as_ref(), Term::Const(v) if *v == 2) {
                // keeps 2^x reserved for the primitive
                out.push_str("(2)");
            } else {
                write_at(base, ATOM, out);
            }
            out.push('^');
            write_at(exp, POW, out);
        }
        Term::Un(UnOp::Pow2, exp) => {
            out.push_str("2^");
            write_at(exp, POW, out);
        }
        Term::Bin(op, l, r) => {
            out.push_str(op.name());
            out.push('(');
            write(l, out);
            out.push_str(", ");
            write(r, out);
            out.push(')');
        }
        Term::Un(op, a) => {
            out.push_str(op.name());
            out.push('(');
            write(a, out);
            out.push(')');
        }
    }
}

/// Renders a term in the textual grammar with minimal parentheses.
pub fn render(t: &Term) -> String {
    let mut out = String::new();
    write(t, &mut out);
    out
}
