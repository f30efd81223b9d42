#include "crane/ident.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "crane/error.hpp"
#include "crane/model.hpp"

namespace crane {

int axis_index(AxisKind kind)
{
    switch (kind) {
    case AxisKind::Traveling: return AxisX;
    case AxisKind::Traversing: return AxisY;
    case AxisKind::Hoisting: return AxisL;
    }
    return AxisX;
}

AxisKnowns knowns_for(const CraneParameters& p, AxisKind kind, double Ts)
{
    const AxisParams& a = p[axis_index(kind)];
    AxisKnowns k;
    k.K = a.K;
    k.Ts = Ts;
    k.m = kind == AxisKind::Hoisting ? p.m : 0.0;
    k.rg = a.rg;
    k.Rp = a.Rp;
    k.g = p.g;
    return k;
}

std::vector<double> generate_excitation(double duration, double Ts, double amplitude, std::uint64_t seed,
                                        const ExcitationShape& shape)
{
    const std::size_t n = static_cast<std::size_t>(std::llround(duration / Ts));
    const auto& freqs = shape.freqs;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2 * std::numbers::pi);

    std::vector<double> out(n);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double ph[3] = {phase(rng), phase(rng), phase(rng)};
        double peak = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double t = k * Ts;
            double s = 0;
            for (int i = 0; i < 3; ++i)
                s += shape.weights[i] * std::sin(2 * std::numbers::pi * freqs[i] * t + ph[i]);
            out[k] = s;
            peak = std::max(peak, std::abs(s));
        }
        if (peak == 0)
            continue;
        std::size_t low = 0;
        for (auto& v : out) {
            v *= amplitude / peak;
            if (std::abs(v) < 0.2 * amplitude)
                ++low;
        }
        if (n == 0 || low * 10 >= n)
            break;
    }
    return out;
}

Vec4 forward_map(double J, double B, double K, double b1, double b2, double Ts)
{
    const double d = J + Ts * B;
    return {J / d, K * Ts / d, -b1 * Ts / d, -b2 * Ts / d};
}

IdentifiedAxis recover_parameters(const Vec4& alpha, double K, double Ts, AxisKind kind, double m, double rg,
                                  double Rp, double g)
{
    (void)g;
    if (!(alpha[0] > 0 && alpha[0] < 1) || !(alpha[1] > 0))
        throw Error(ErrorKind::OutOfRange, "regression coefficients outside the admissible region");
    IdentifiedAxis r;
    r.J = K * Ts * alpha[0] / alpha[1];
    r.B = K * (1 - alpha[0]) / alpha[1];
    r.a1 = -K * (alpha[2] + alpha[3]) / alpha[1];
    r.a2 = -K * (alpha[2] - alpha[3]) / alpha[1];
    r.b1 = -K * alpha[2] / alpha[1];
    r.b2 = -K * alpha[3] / alpha[1];
    if (kind == AxisKind::Hoisting)
        r.J -= rg * Rp * m;
    return r;
}

double hoist_offset(AxisKind kind, const AxisKnowns& k)
{
    if (kind != AxisKind::Hoisting)
        return 0.0;
    return k.rg * k.Rp * k.m * k.g / k.K;
}

std::vector<double> backward_velocity(const std::vector<double>& position, double Ts)
{
    std::vector<double> v(position.size(), 0.0);
    for (std::size_t k = 1; k < position.size(); ++k)
        v[k] = (position[k] - position[k - 1]) / Ts;
    return v;
}

namespace {

double sgn_db(double v, double db)
{
    return v > db ? 1.0 : (v < -db ? -1.0 : 0.0);
}

std::vector<double> moving_average(const std::vector<double>& x, int window)
{
    if (window <= 1)
        return x;
    std::vector<double> y(x.size());
    double acc = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        acc += x[k];
        if (k >= static_cast<std::size_t>(window))
            acc -= x[k - window];
        y[k] = acc / static_cast<double>(std::min<std::size_t>(k + 1, window));
    }
    return y;
}

}  // namespace

namespace {

bool keep_window(const std::vector<double>& v, std::size_t i, const AxisKnowns& k, const IdentOptions& opt)
{
    if (!opt.skip_crossings)
        return true;
    const double sg = sgn_db(v[i], k.deadband);
    if (sg == 0 || sgn_db(v[i - 1], k.deadband) != sg || sgn_db(v[i - 2], k.deadband) != sg)
        return false;
    return std::min({std::abs(v[i]), std::abs(v[i - 1]), std::abs(v[i - 2])}) >= opt.skip_speed;
}

}  // namespace

std::vector<RegressorSample> build_regressors(const AxisData& data, AxisKind kind, const AxisKnowns& k,
                                              const IdentOptions& opt)
{
    const auto v = moving_average(backward_velocity(data.position, k.Ts), opt.prefilter);
    const double off = hoist_offset(kind, k);
    std::vector<RegressorSample> out;
    const std::size_t n = std::min(v.size(), data.voltage.size() + 1);
    for (std::size_t i = 2; i < n; ++i) {
        if (!keep_window(v, i, k, opt))
            continue;
        RegressorSample s;
        s.y = v[i];
        s.phi << v[i - 1], data.voltage[i - 1] + off, sgn_db(v[i], k.deadband), 1.0;
        out.push_back(s);
    }
    return out;
}

std::vector<RegressorSampleN<5>> build_sampled_regressors(const AxisData& data, AxisKind kind, const AxisKnowns& k,
                                                          const IdentOptions& opt)
{
    const auto v = moving_average(backward_velocity(data.position, k.Ts), opt.prefilter);
    const double off = hoist_offset(kind, k);
    std::vector<RegressorSampleN<5>> out;
    const std::size_t n = std::min(v.size(), data.voltage.size() + 1);
    for (std::size_t i = 2; i < n; ++i) {
        if (!keep_window(v, i, k, opt))
            continue;
        RegressorSampleN<5> s;
        s.y = v[i];
        s.phi << v[i - 1], data.voltage[i - 1] + off, data.voltage[i - 2] + off, sgn_db(v[i], k.deadband), 1.0;
        out.push_back(s);
    }
    return out;
}

Vec5 sampled_forward_map(double J, double B, double K, double b1, double b2, double Ts)
{
    const double h = B * Ts / J;
    const double a = std::exp(-h);
    const double one_minus = -std::expm1(-h);
    const double gamma = one_minus / h;
    const double beta = one_minus / B;
    const double delta = (1 - gamma) / B;
    const double eps = gamma * beta - a * delta;
    Vec5 t;
    t << a, K * delta, K * eps, -one_minus * b1 / B, -one_minus * b2 / B;
    return t;
}

IdentifiedAxis recover_sampled(const Vec5& theta, double K, double Ts, AxisKind kind, double m, double rg, double Rp)
{
    const double S = theta[1] + theta[2];
    if (!(theta[0] > 0 && theta[0] < 1) || !(S > 0))
        throw Error(ErrorKind::OutOfRange, "regression coefficients outside the admissible region");
    IdentifiedAxis r;
    r.B = K * (1 - theta[0]) / S;
    r.J = r.B * Ts / -std::log(theta[0]);
    if (kind == AxisKind::Hoisting)
        r.J -= rg * Rp * m;
    r.b1 = -K * theta[3] / S;
    r.b2 = -K * theta[4] / S;
    r.a1 = r.b1 + r.b2;
    r.a2 = r.b1 - r.b2;
    return r;
}

namespace {

template <int N>
Eigen::VectorXd run_rls(std::vector<RegressorSampleN<N>> samples, const IdentOptions& opt,
                        std::vector<Eigen::VectorXd>& trace)
{
    using Vec = Eigen::Matrix<double, N, 1>;
    Vec scale = Vec::Ones();
    if (opt.normalize && !samples.empty()) {
        Vec acc = Vec::Zero();
        for (const auto& s : samples)
            acc += s.phi.cwiseAbs2();
        for (int i = 0; i < N; ++i)
            if (acc[i] > 0)
                scale[i] = std::sqrt(acc[i] / static_cast<double>(samples.size()));
        for (auto& s : samples)
            s.phi = s.phi.cwiseQuotient(scale);
    }
    RlsStateN<N> st;
    trace.reserve(samples.size());
    for (const auto& sample : samples) {
        st = rls_update(st, sample, opt.forgetting);
        trace.emplace_back(st.theta.cwiseQuotient(scale));
    }
    return st.theta.cwiseQuotient(scale);
}

}  // namespace

IdentResult identify_axis(const AxisData& data, AxisKind kind, const AxisKnowns& k, const IdentOptions& opt)
{
    if (data.position.size() < 100 || data.voltage.size() < 100)
        throw Error(ErrorKind::InsufficientData, "identification needs at least 100 samples");
    IdentResult res;
    if (opt.regression == Regression::BackwardDifference) {
        res.alpha = run_rls<4>(build_regressors(data, kind, k, opt), opt, res.trace);
        res.axis = recover_parameters(res.alpha, k.K, k.Ts, kind, k.m, k.rg, k.Rp, k.g);
    } else {
        res.alpha = run_rls<5>(build_sampled_regressors(data, kind, k, opt), opt, res.trace);
        res.axis = recover_sampled(res.alpha, k.K, k.Ts, kind, k.m, k.rg, k.Rp);
    }
    return res;
}

AxisData simulate_axis(const IdentifiedAxis& axis, const std::vector<double>& voltage, AxisKind kind,
                       const AxisKnowns& k, double q0, int substeps)
{
    const double Jm = axis.J + (kind == AxisKind::Hoisting ? k.rg * k.Rp * k.m : 0.0);
    const double off = hoist_offset(kind, k);
    const double a1 = axis.b1 + axis.b2;
    const double a2 = axis.b1 - axis.b2;
    const double h = k.Ts / substeps;
    AxisData out;
    out.voltage = voltage;
    out.position.reserve(voltage.size() + 1);
    double q = q0, v = 0;
    out.position.push_back(q);
    for (double u : voltage) {
        auto acc = [&](double vel) {
            return (k.K * (u + off) - axis.B * vel - coulomb_friction(vel, a1, a2, k.deadband)) / Jm;
        };
        for (int i = 0; i < substeps; ++i) {
            const double k1q = v, k1v = acc(v);
            const double k2q = v + 0.5 * h * k1v, k2v = acc(k2q);
            const double k3q = v + 0.5 * h * k2v, k3v = acc(k3q);
            const double k4q = v + h * k3v, k4v = acc(k4q);
            q += h / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        }
        out.position.push_back(q);
    }
    return out;
}

ValidationMse validate_model(const IdentifiedAxis& axis, const AxisData& data, AxisKind kind, const AxisKnowns& k)
{
    const double q0 = data.position.empty() ? 0.0 : data.position.front();
    const std::size_t n = std::min(data.position.size(), data.voltage.size() + 1);
    std::vector<double> u(data.voltage.begin(), data.voltage.begin() + (n > 0 ? n - 1 : 0));
    const AxisData sim = simulate_axis(axis, u, kind, k, q0);
    const auto vm = backward_velocity(data.position, k.Ts);
    const auto vs = backward_velocity(sim.position, k.Ts);
    ValidationMse mse;
    if (n < 2)
        return mse;
    for (std::size_t i = 1; i < n; ++i) {
        const double dq = sim.position[i] - data.position[i];
        const double dv = vs[i] - vm[i];
        mse.position += dq * dq;
        mse.velocity += dv * dv;
    }
    mse.position /= static_cast<double>(n - 1);
    mse.velocity /= static_cast<double>(n - 1);
    return mse;
}

AxisData plant_experiment(const CraneParameters& p, AxisKind kind, const std::vector<double>& voltage, double Ts,
                          int substeps, double l0)
{
    const int ax = axis_index(kind);
    CraneParameters q = p;
    PlantOptions opt;
    if (kind != AxisKind::Hoisting) {
        q.m = 0.0;
        opt.swing = false;
    }
    CraneState s;
    s.l = l0;
    AxisData out;
    out.voltage = voltage;
    out.position.reserve(voltage.size() + 1);
    out.position.push_back(s.pos(ax));
    for (double v : voltage) {
        PlantInput u;
        u.v[ax] = v;
        s = step(s, u, q, Ts, substeps, opt);
        out.position.push_back(s.pos(ax));
    }
    return out;
}

}  // namespace crane
