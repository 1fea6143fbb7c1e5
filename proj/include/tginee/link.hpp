#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace tginee {

enum class LinkKind { identity, logit, probit, sparse_logit };

inline const char* to_string(LinkKind k) {
    switch (k) {
        case LinkKind::identity: return "identity";
        case LinkKind::logit: return "logit";
        case LinkKind::probit: return "probit";
        case LinkKind::sparse_logit: return "sparse_logit";
    }
    return "?";
}

inline LinkKind link_kind_from_string(const std::string& s) {
    if (s == "identity") return LinkKind::identity;
    if (s == "logit") return LinkKind::logit;
    if (s == "probit") return LinkKind::probit;
    if (s == "sparse_logit") return LinkKind::sparse_logit;
    throw std::invalid_argument("unknown link kind: " + s);
}

namespace detail {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

inline double normal_pdf(double x) {
    return 0.39894228040143267793994605993438 * std::exp(-0.5 * x * x);
}

// Inverse standard normal CDF: Acklam's rational approximation refined by
// two Newton steps against erfc, giving near machine precision on (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        double e = normal_cdf(x) - p;
        x -= e / normal_pdf(x);
    }
    return x;
}

}  // namespace detail

/// The link family g used throughout score and loss computations.
/// Inverse outputs are clamped to [eps*s_eff, s_eff - eps*s_eff] with
/// s_eff = s for sparse_logit and 1 otherwise, so g' stays finite.
struct LinkFunction {
    LinkKind kind = LinkKind::logit;
    double s = 1.0;           // sparsity coefficient, sparse_logit only
    double clamp_eps = 1e-6;  // probability clamp

    LinkFunction() = default;
    LinkFunction(LinkKind k, double s_ = 1.0, double eps = 1e-6)
        : kind(k), s(s_), clamp_eps(eps) {
        if (kind == LinkKind::sparse_logit && !(s > 0.0 && s <= 1.0))
            throw std::invalid_argument("sparse_logit requires 0 < s <= 1");
        if (!(clamp_eps > 0.0 && clamp_eps < 0.5))
            throw std::invalid_argument("clamp_eps must lie in (0, 1/2)");
    }

    static LinkFunction identity(double eps = 1e-6) { return {LinkKind::identity, 1.0, eps}; }
    static LinkFunction logit(double eps = 1e-6) { return {LinkKind::logit, 1.0, eps}; }
    static LinkFunction probit(double eps = 1e-6) { return {LinkKind::probit, 1.0, eps}; }
    static LinkFunction sparse_logit(double s, double eps = 1e-6) {
        return {LinkKind::sparse_logit, s, eps};
    }

    double upper() const { return kind == LinkKind::sparse_logit ? s : 1.0; }
    double lo_clamp() const { return clamp_eps * upper(); }
    double hi_clamp() const { return upper() - clamp_eps * upper(); }

    /// p = g^{-1}(x), clamped into the interior of the admissible range.
    double inverse(double x) const {
        if (!std::isfinite(x)) throw std::domain_error("link inverse: non-finite input");
        double p;
        switch (kind) {
            case LinkKind::identity: p = x; break;
            case LinkKind::logit: p = 1.0 / (1.0 + std::exp(-x)); break;
            case LinkKind::probit: p = detail::normal_cdf(x); break;
            case LinkKind::sparse_logit: p = s / (1.0 + std::exp(-x)); break;
            default: throw std::domain_error("bad link kind");
        }
        return std::min(std::max(p, lo_clamp()), hi_clamp());
    }

    /// g(p) for p strictly inside the clamped range.
    double forward(double p) const {
        check_interior(p);
        switch (kind) {
            case LinkKind::identity: return p;
            case LinkKind::logit: return std::log(p / (1.0 - p));
            case LinkKind::probit: return detail::normal_quantile(p);
            case LinkKind::sparse_logit: return std::log(p / (s - p));
        }
        throw std::domain_error("bad link kind");
    }

    /// g'(p) for p strictly inside the clamped range.
    double derivative_of_g_at(double p) const {
        check_interior(p);
        switch (kind) {
            case LinkKind::identity: return 1.0;
            case LinkKind::logit: return 1.0 / (p * (1.0 - p));
            case LinkKind::probit: return 1.0 / detail::normal_pdf(detail::normal_quantile(p));
            case LinkKind::sparse_logit: return s / (p * (s - p));
        }
        throw std::domain_error("bad link kind");
    }

private:
    void check_interior(double p) const {
        if (!std::isfinite(p) || p < lo_clamp() || p > hi_clamp())
            throw std::domain_error("link: probability outside clamped range");
    }
};

}  // namespace tginee
