#include "shrinkage/weights.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shrinkage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_p(double t, double p) { return p == 2.0 ? t * t : std::pow(t, p); }

double eval_raw(WeightId id, double p, double t) {
    switch (id) {
        case WeightId::Indicator:
            return t < 1.0 ? 1.0 : 0.0;
        case WeightId::Winsorize:
            return t <= 1.0 ? 1.0 : 1.0 / t;
        case WeightId::LeeValiant: {
            const double x = pow_p(t, p);
            return x >= 1.0 ? 0.0 : 1.0 - x;
        }
        case WeightId::ExpPower:
            return std::exp(-pow_p(t, p));
        case WeightId::RationalPower:
            return 1.0 / (1.0 + pow_p(t, p));
        case WeightId::LogSquared:
            return 1.0 / std::log(std::numbers::e + t * t);
        case WeightId::CircleArc: {
            if (t >= 1.0) return 0.0;
            const double u = 1.0 - t;
            return 1.0 - std::sqrt(1.0 - u * u);
        }
        case WeightId::LogLinear:
            return 1.0 / std::log(std::numbers::e + t);
        case WeightId::InverseSqrt:
            return 1.0 / (1.0 + std::sqrt(t));
    }
    throw std::logic_error("weights: unknown WeightId");
}

// Maximizes f(t) = t*w(t) over t > 0 by bracketed golden-section search.
// The catalog maps are unimodal; the bracket [0, hi] is grown geometrically
// until the maximum is interior.
struct MaxResult {
    double argmax;
    double value;
};

MaxResult maximize_tw(WeightId id, double p, double tol = 1e-12) {
    auto f = [&](double t) { return t * eval_raw(id, p, t); };
    double hi = 1.0;
    for (int i = 0; i < 200 && f(hi) >= f(hi / 2.0); ++i) hi *= 2.0;
    double lo = 0.0;
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + b)) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double t_star = 0.5 * (a + b);
    return {t_star, f(t_star)};
}

}  // namespace

double WeightFn::eval(double t) const {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::invalid_argument("WeightFn::eval: t must be finite and nonnegative");
    if (t == 0.0) return 1.0;
    return eval_raw(id, p, t);
}

double WeightFn::m_alpha(double alpha) const {
    if (!(alpha > 0.0))
        throw std::invalid_argument("WeightFn::m_alpha: alpha must be positive");
    return c_w / alpha;
}

std::string WeightFn::name() const {
    switch (id) {
        case WeightId::Indicator: return "indicator";
        case WeightId::Winsorize: return "winsorize";
        case WeightId::LeeValiant: return "lee-valiant";
        case WeightId::ExpPower: return "exp";
        case WeightId::RationalPower: return "rational";
        case WeightId::LogSquared: return "log2";
        case WeightId::CircleArc: return "circle";
        case WeightId::LogLinear: return "log1";
        case WeightId::InverseSqrt: return "invsqrt";
    }
    return "?";
}

WeightFn WeightFn::make(WeightId id, double p) {
    WeightFn w;
    w.id = id;
    w.p = p;
    switch (id) {
        case WeightId::Indicator:
            // sup t*1{t<1} = 1, approached as t -> 1-.
            w.c_w = 1.0;
            w.cw_maximizer = 1.0;
            w.a3_upto = kInf;
            w.support_end = 1.0;
            w.solver = SolverKind::ClosedFormOrderStat;
            break;
        case WeightId::Winsorize:
            // t*w(t) = t ∧ 1, flat at 1 for t >= 1.
            w.c_w = 1.0;
            w.cw_maximizer = 1.0;
            w.a3_upto = kInf;
            w.solver = SolverKind::ClosedFormPiecewiseLinear;
            break;
        case WeightId::LeeValiant:
            if (!(p > 1.0)) throw std::invalid_argument("lee-valiant: requires p > 1");
            w.c_w = p * std::pow(p + 1.0, -(p + 1.0) / p);
            w.cw_maximizer = std::pow(p + 1.0, -1.0 / p);
            w.a3_upto = p;
            w.support_end = 1.0;
            break;
        case WeightId::ExpPower: {
            if (!(p > 1.0)) throw std::invalid_argument("exp: requires p > 1");
            const auto m = maximize_tw(id, p);
            w.c_w = m.value;
            w.cw_maximizer = m.argmax;
            w.a3_upto = p;
            break;
        }
        case WeightId::RationalPower: {
            if (!(p > 1.0)) throw std::invalid_argument("rational: requires p > 1");
            const auto m = maximize_tw(id, p);
            w.c_w = m.value;
            w.cw_maximizer = m.argmax;
            w.a3_upto = p;
            break;
        }
        case WeightId::LogSquared:
            w.c_w = kInf;
            w.a3_upto = 2.0;
            break;
        case WeightId::CircleArc: {
            const auto m = maximize_tw(id, p);
            w.c_w = m.value;
            w.cw_maximizer = m.argmax;
            w.a3_upto = 0.0;  // infinite derivative at 0: no positive q works
            w.support_end = 1.0;
            break;
        }
        case WeightId::LogLinear:
            w.c_w = kInf;
            w.a3_upto = 1.0;
            break;
        case WeightId::InverseSqrt:
            w.c_w = kInf;
            w.a3_upto = 0.5;
            break;
    }
    w.satisfies_a2 = std::isfinite(w.c_w);
    return w;
}

WeightFn WeightFn::parse(std::string_view name, double p) {
    if (name == "indicator") return make(WeightId::Indicator, p);
    if (name == "winsorize") return make(WeightId::Winsorize, p);
    if (name == "lee-valiant" || name == "lv") return make(WeightId::LeeValiant, p);
    if (name == "exp") return make(WeightId::ExpPower, p);
    if (name == "rational") return make(WeightId::RationalPower, p);
    if (name == "log2") return make(WeightId::LogSquared, p);
    if (name == "circle") return make(WeightId::CircleArc, p);
    if (name == "log1") return make(WeightId::LogLinear, p);
    if (name == "invsqrt") return make(WeightId::InverseSqrt, p);
    throw std::invalid_argument("unknown weight function: " + std::string(name));
}

std::vector<WeightFn> WeightFn::catalog(double p) {
    return {
        make(WeightId::Indicator, p),     make(WeightId::Winsorize, p),
        make(WeightId::LeeValiant, p),    make(WeightId::ExpPower, p),
        make(WeightId::RationalPower, p), make(WeightId::LogSquared, p),
        make(WeightId::CircleArc, p),     make(WeightId::LogLinear, p),
        make(WeightId::InverseSqrt, p),
    };
}

}  // namespace shrinkage
