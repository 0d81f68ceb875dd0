use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GelmanRubin {
    /// Potential scale reduction factor.
    pub r_hat: f64,
    /// Upper limit of its 95% interval.
    pub upper_ci: f64,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn var(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() as f64 - 1.0)
}

fn cov(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Potential scale reduction factor of equal-length chains of a scalar
/// summary, with the degrees-of-freedom correction and the F-based upper
/// confidence limit of Brooks and Gelman (1998).
pub fn gelman_rubin(chains: &[Vec<f64>]) -> Result<GelmanRubin> {
    let m = chains.len();
    if m < 2 {
        return Err(Error::Domain("at least two chains are required".into()));
    }
    let n = chains[0].len();
    if n < 2 || chains.iter().any(|c| c.len() != n) {
        return Err(Error::Domain(
            "chains must share a length of at least two".into(),
        ));
    }
    let (mf, nf) = (m as f64, n as f64);
    let s2: Vec<f64> = chains.iter().map(|c| var(c)).collect();
    let xbar: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let w = mean(&s2);
    let constant = chains.iter().all(|c| c.iter().all(|&v| v == c[0]));
    if constant || !(w > 0.0) {
        return Err(Error::Degenerate(
            "within-chain variance is zero".into(),
        ));
    }
    let b = nf * var(&xbar);
    let muhat = mean(&xbar);
    let var_w = var(&s2) / mf;
    let var_b = 2.0 * b * b / (mf - 1.0);
    let xbar2: Vec<f64> = xbar.iter().map(|x| x * x).collect();
    let cov_wb = (nf / mf) * (cov(&s2, &xbar2) - 2.0 * muhat * cov(&s2, &xbar));

    let v = (nf - 1.0) * w / nf + (1.0 + 1.0 / mf) * b / nf;
    let var_v = ((nf - 1.0).powi(2) * var_w
        + (1.0 + 1.0 / mf).powi(2) * var_b
        + 2.0 * (nf - 1.0) * (1.0 + 1.0 / mf) * cov_wb)
        / (nf * nf);
    let df_v = 2.0 * v * v / var_v;
    let df_adj = if df_v.is_finite() {
        (df_v + 3.0) / (df_v + 1.0)
    } else {
        1.0
    };
    let b_df = mf - 1.0;
    let w_df = 2.0 * w * w / var_w;

    let r2_fixed = (nf - 1.0) / nf;
    let r2_random = (1.0 + 1.0 / mf) * (1.0 / nf) * (b / w);
    let quantile = if w_df.is_finite() {
        FisherSnedecor::new(b_df, w_df)
            .map_err(|e| Error::Degenerate(e.to_string()))?
            .inverse_cdf(0.975)
    } else {
        ChiSquared::new(b_df)
            .map_err(|e| Error::Degenerate(e.to_string()))?
            .inverse_cdf(0.975)
            / b_df
    };
    Ok(GelmanRubin {
        r_hat: (df_adj * (r2_fixed + r2_random)).sqrt(),
        upper_ci: (df_adj * (r2_fixed + quantile * r2_random)).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ess {
    pub value: f64,
    /// The raw estimate exceeded the series length and was clamped.
    pub clamped: bool,
    /// The series is constant; `value` is its length.
    pub degenerate: bool,
}

/// Effective sample size from the autocorrelation sum truncated by Geyer's
/// initial monotone positive sequence.
pub fn effective_sample_size(series: &[f64]) -> Result<Ess> {
    let n = series.len();
    if n < 10 {
        return Err(Error::Domain(format!(
            "effective sample size needs at least 10 values, got {n}"
        )));
    }
    let nf = n as f64;
    let m = mean(series);
    let centred: Vec<f64> = series.iter().map(|v| v - m).collect();
    let autocov = |lag: usize| -> f64 {
        centred[..n - lag]
            .iter()
            .zip(&centred[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / nf
    };
    let gamma0 = autocov(0);
    if !(gamma0 > 0.0) {
        return Ok(Ess {
            value: nf,
            clamped: false,
            degenerate: true,
        });
    }
    let mut sum = 0.0;
    let mut previous = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = autocov(lag) + autocov(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(previous);
        sum += pair;
        previous = pair;
        lag += 2;
    }
    let tau = (2.0 * sum - gamma0) / gamma0;
    let raw = nf / tau;
    if !(tau > 0.0) || raw > nf {
        return Ok(Ess {
            value: nf,
            clamped: true,
            degenerate: false,
        });
    }
    Ok(Ess {
        value: raw,
        clamped: false,
        degenerate: false,
    })
}
