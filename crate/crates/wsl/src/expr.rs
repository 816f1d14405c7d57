//! Arithmetic expressions in one variable, used for `expression` profiles
//! and schedule formulas.
//!
//! Numbers are parsed by `evalexpr`, so integer literals divide as integers
//! (`1/2 == 0`); write `1.0/2.0`. The variable is always a float.

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables, DefaultNumericTypes, Function,
    HashMapContext, Node, Value,
};

use crate::CliError;

pub struct Expression {
    text: String,
    var: &'static str,
    node: Node<DefaultNumericTypes>,
}

macro_rules! unary {
    ($ctx:ident, $name:literal, $f:expr) => {
        $ctx.set_function(
            $name.into(),
            Function::new(|arg: &Value<DefaultNumericTypes>| {
                let x: f64 = arg.as_number()?;
                Ok(Value::Float($f(x)))
            }),
        )
        .expect("function names are valid");
    };
}

impl Expression {
    pub fn compile(text: &str, var: &'static str) -> Result<Self, CliError> {
        let node = build_operator_tree::<DefaultNumericTypes>(text)
            .map_err(|e| CliError::Parse(format!("expression `{text}`: {e}")))?;
        Ok(Self { text: text.to_string(), var, node })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn eval(&self, x: f64) -> Result<f64, CliError> {
        let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
        ctx.set_value(self.var.into(), Value::Float(x)).expect("variable names are valid");
        ctx.set_value("pi".into(), Value::Float(std::f64::consts::PI)).expect("constant names are valid");
        unary!(ctx, "sin", f64::sin);
        unary!(ctx, "cos", f64::cos);
        unary!(ctx, "tan", f64::tan);
        unary!(ctx, "exp", f64::exp);
        unary!(ctx, "ln", f64::ln);
        unary!(ctx, "sqrt", f64::sqrt);
        unary!(ctx, "abs", f64::abs);
        unary!(ctx, "asin", f64::asin);
        unary!(ctx, "acos", f64::acos);
        unary!(ctx, "atan", f64::atan);
        let v = self
            .node
            .eval_number_with_context(&ctx)
            .map_err(|e| CliError::Parse(format!("expression `{}` at {} = {x}: {e}", self.text, self.var)))?;
        if !v.is_finite() {
            return Err(CliError::Parse(format!("expression `{}` is not finite at {} = {x}", self.text, self.var)));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_with_helpers() {
        let e = Expression::compile("sin(s) + 0.4 * sin(3 * s)", "s").unwrap();
        let x: f64 = 0.7;
        assert!((e.eval(x).unwrap() - (x.sin() + 0.4 * (3.0 * x).sin())).abs() < 1e-15);
        let j = Expression::compile("j / (j + 1)", "j").unwrap();
        assert_eq!(j.eval(3.0).unwrap(), 0.75);
        assert!(Expression::compile("sin(", "s").is_err());
        assert!(Expression::compile("ln(s)", "s").unwrap().eval(0.0).is_err());
    }
}
