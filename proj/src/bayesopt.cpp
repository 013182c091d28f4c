#include "attnsim/bayesopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace attnsim {

namespace {

constexpr double kMaxJitter = 1e-6;
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

Eigen::LLT<Eigen::MatrixXd> chol_with_jitter(const Eigen::MatrixXd& gram, double base_jitter,
                                             double* jitter_used) {
    const int n = static_cast<int>(gram.rows());
    double jitter = base_jitter;
    for (;;) {
        Eigen::MatrixXd k = gram + jitter * Eigen::MatrixXd::Identity(n, n);
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            if (jitter_used) *jitter_used = jitter;
            return llt;
        }
        jitter *= 10.0;
        if (jitter > kMaxJitter * 1.0001)
            throw std::runtime_error(
                "Gram matrix is not positive definite even at jitter 1e-6; the design likely "
                "contains (near-)duplicate points");
    }
}

}  // namespace

void HyperBox::validate() const {
    if (lower.size() == 0 || lower.size() != upper.size())
        throw std::invalid_argument("hyper box needs matching non-empty bounds");
    if (((upper - lower).array() <= 0.0).any())
        throw std::invalid_argument("hyper box needs lower < upper per dimension");
}

bool HyperBox::contains(const Eigen::VectorXd& theta) const {
    if (theta.size() != lower.size()) return false;
    return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

Eigen::VectorXd HyperBox::clip(Eigen::VectorXd theta) const {
    for (int i = 0; i < theta.size(); ++i)
        theta(i) = std::clamp(theta(i), lower(i), upper(i));
    return theta;
}

Eigen::VectorXd HyperBox::sample(Rng& rng) const {
    Eigen::VectorXd out(dims());
    for (int i = 0; i < dims(); ++i) out(i) = rng.uniform(lower(i), upper(i));
    return out;
}

double kernel_eval(const Kernel& kernel, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() != kernel.inv_lengthscale.size())
        throw std::invalid_argument("kernel dimension mismatch");
    double s = (kernel.inv_lengthscale.array() * (a - b).array().square()).sum();
    return kernel.amplitude * std::exp(-s);
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const std::vector<Observation>& obs) {
    const int n = static_cast<int>(obs.size());
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            double v = kernel_eval(kernel, obs[i].theta, obs[j].theta);
            gram(i, j) = v;
            gram(j, i) = v;
        }
    }
    return gram;
}

GpPosterior::GpPosterior(Kernel kernel, std::vector<Observation> observations)
    : kernel_(std::move(kernel)), obs_(std::move(observations)) {
    if (obs_.empty()) throw std::invalid_argument("posterior needs at least one observation");
    llt_ = chol_with_jitter(gram_matrix(kernel_, obs_), kernel_.jitter, &jitter_used_);
    Eigen::VectorXd resid(obs_.size());
    for (std::size_t i = 0; i < obs_.size(); ++i) resid(i) = obs_[i].value - kernel_.mean0;
    alpha_ = llt_.solve(resid);
}

std::pair<double, double> GpPosterior::predict(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd kstar(obs_.size());
    for (std::size_t i = 0; i < obs_.size(); ++i)
        kstar(i) = kernel_eval(kernel_, theta, obs_[i].theta);
    double mean = kernel_.mean0 + kstar.dot(alpha_);
    Eigen::VectorXd v = llt_.matrixL().solve(kstar);
    double var = kernel_eval(kernel_, theta, theta) - v.squaredNorm();
    return {mean, std::sqrt(std::max(var, 0.0))};
}

std::pair<double, double> gp_posterior(const Kernel& kernel,
                                       const std::vector<Observation>& observations,
                                       const Eigen::VectorXd& theta) {
    return GpPosterior(kernel, observations).predict(theta);
}

double log_marginal_likelihood(const Kernel& kernel,
                               const std::vector<Observation>& observations) {
    if (observations.empty()) throw std::invalid_argument("need at least one observation");
    const int n = static_cast<int>(observations.size());
    Eigen::LLT<Eigen::MatrixXd> llt =
        chol_with_jitter(gram_matrix(kernel, observations), kernel.jitter, nullptr);
    Eigen::VectorXd resid(n);
    for (int i = 0; i < n; ++i) resid(i) = observations[i].value - kernel.mean0;
    Eigen::VectorXd alpha = llt.solve(resid);
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i));
    return -0.5 * resid.dot(alpha) - logdet - 0.5 * n * std::log(2.0 * M_PI);
}

MleBounds MleBounds::from_observations(const std::vector<Observation>& observations) {
    if (observations.empty()) throw std::invalid_argument("need observations for bounds");
    const int d = static_cast<int>(observations.front().theta.size());
    double vmin = observations.front().value, vmax = vmin;
    Eigen::VectorXd tmin = observations.front().theta, tmax = tmin;
    for (const Observation& o : observations) {
        vmin = std::min(vmin, o.value);
        vmax = std::max(vmax, o.value);
        tmin = tmin.cwiseMin(o.theta);
        tmax = tmax.cwiseMax(o.theta);
    }
    double vrange = std::max(vmax - vmin, 1e-3);
    double wmax = 1e-12;
    for (int i = 0; i < d; ++i) wmax = std::max(wmax, tmax(i) - tmin(i));

    MleBounds b;
    b.mean_lo = vmin - vrange;
    b.mean_hi = vmax + vrange;
    b.log_amplitude_lo = std::log(1e-4 * vrange * vrange);
    b.log_amplitude_hi = std::log(25.0 * vrange * vrange);
    // lengthscales from wmax/100 up to 10 * wmax
    b.log_inv_lengthscale_lo = std::log(1.0 / (100.0 * wmax * wmax));
    b.log_inv_lengthscale_hi = std::log(1e4 / (wmax * wmax));
    return b;
}

namespace {

// shared unit-cube ascent used by both the MLE and the EI search
Eigen::VectorXd ascend_unit(const std::function<double(const Eigen::VectorXd&)>& objective,
                            Eigen::VectorXd x, int iterations, double* best_value) {
    const int d = static_cast<int>(x.size());
    auto clamp01 = [](Eigen::VectorXd v) {
        for (int i = 0; i < v.size(); ++i) v(i) = std::clamp(v(i), 0.0, 1.0);
        return v;
    };
    x = clamp01(std::move(x));
    double fx = objective(x);
    double step = 0.1;
    const double h = 1e-6;
    for (int it = 0; it < iterations && step > 1e-7; ++it) {
        Eigen::VectorXd grad(d);
        for (int i = 0; i < d; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) = std::clamp(xp(i) + h, 0.0, 1.0);
            xm(i) = std::clamp(xm(i) - h, 0.0, 1.0);
            double denom = xp(i) - xm(i);
            grad(i) = denom > 0.0 ? (objective(xp) - objective(xm)) / denom : 0.0;
        }
        double norm = grad.norm();
        if (norm == 0.0 || !std::isfinite(norm)) break;
        Eigen::VectorXd trial = clamp01(x + (step / norm) * grad);
        double ft = objective(trial);
        if (ft > fx) {
            x = trial;
            fx = ft;
            step = std::min(step * 1.3, 0.25);
        } else {
            step *= 0.5;
        }
    }
    if (best_value) *best_value = fx;
    return x;
}

}  // namespace

KernelFit fit_kernel_mle(const std::vector<Observation>& observations, int restarts,
                         const MleBounds& bounds, Rng& rng, int max_iterations, double jitter) {
    if (observations.size() < 2)
        throw std::invalid_argument("kernel MLE needs at least two observations");
    const int d = static_cast<int>(observations.front().theta.size());
    const int np = d + 2;  // mean0, log amplitude, log inverse lengthscales

    Eigen::VectorXd lo(np), hi(np);
    lo(0) = bounds.mean_lo;
    hi(0) = bounds.mean_hi;
    lo(1) = bounds.log_amplitude_lo;
    hi(1) = bounds.log_amplitude_hi;
    for (int i = 0; i < d; ++i) {
        lo(2 + i) = bounds.log_inv_lengthscale_lo;
        hi(2 + i) = bounds.log_inv_lengthscale_hi;
    }
    auto to_kernel = [&](const Eigen::VectorXd& unit) {
        Eigen::VectorXd p = lo + (hi - lo).cwiseProduct(unit);
        Kernel k;
        k.mean0 = p(0);
        k.amplitude = std::exp(p(1));
        k.inv_lengthscale = p.segment(2, d).array().exp();
        k.jitter = jitter;
        return k;
    };
    auto objective = [&](const Eigen::VectorXd& unit) {
        try {
            return log_marginal_likelihood(to_kernel(unit), observations);
        } catch (const std::exception&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    // heuristic init: data mean/variance, lengthscale = half the design width
    double vmean = 0.0, vvar = 0.0;
    Eigen::VectorXd tmin = observations.front().theta, tmax = tmin;
    for (const Observation& o : observations) {
        vmean += o.value;
        tmin = tmin.cwiseMin(o.theta);
        tmax = tmax.cwiseMax(o.theta);
    }
    vmean /= static_cast<double>(observations.size());
    for (const Observation& o : observations) vvar += (o.value - vmean) * (o.value - vmean);
    vvar = std::max(vvar / static_cast<double>(observations.size()), 1e-8);
    Eigen::VectorXd init(np);
    init(0) = vmean;
    init(1) = std::log(vvar);
    for (int i = 0; i < d; ++i) {
        double w = std::max(tmax(i) - tmin(i), 1e-6);
        init(2 + i) = std::log(4.0 / (w * w));
    }
    Eigen::VectorXd init_unit(np);
    for (int i = 0; i < np; ++i)
        init_unit(i) = std::clamp((init(i) - lo(i)) / (hi(i) - lo(i)), 0.0, 1.0);
    const double init_ll = objective(init_unit);

    Eigen::VectorXd best_unit = init_unit;
    double best_ll = init_ll;
    for (int r = 0; r < std::max(restarts, 1); ++r) {
        Eigen::VectorXd start(np);
        if (r == 0) {
            start = init_unit;
        } else {
            for (int i = 0; i < np; ++i) start(i) = rng.uniform01();
        }
        double value = 0.0;
        Eigen::VectorXd unit = ascend_unit(objective, start, max_iterations, &value);
        if (value > best_ll) {
            best_ll = value;
            best_unit = unit;
        }
    }

    KernelFit fit;
    fit.kernel = to_kernel(best_unit);
    fit.log_likelihood = best_ll;
    fit.improved = best_ll > init_ll;
    return fit;
}

double expected_improvement(double mean, double sd, double incumbent) {
    if (sd < 0.0) throw std::invalid_argument("sd must be non-negative");
    double diff = mean - incumbent;
    if (sd == 0.0) return std::max(diff, 0.0);
    double z = diff / sd;
    double pdf = kInvSqrt2Pi * std::exp(-0.5 * z * z);
    double cdf = 0.5 * std::erfc(-z / kSqrt2);
    return std::max(diff * cdf + sd * pdf, 0.0);
}

std::vector<Eigen::VectorXd> latin_hypercube(const HyperBox& box, int count, Rng& rng) {
    box.validate();
    if (count < 1) throw std::invalid_argument("need at least one sample");
    const int d = box.dims();
    std::vector<std::vector<int>> strata(d, std::vector<int>(count));
    for (int j = 0; j < d; ++j) {
        std::iota(strata[j].begin(), strata[j].end(), 0);
        for (int i = count - 1; i > 0; --i)
            std::swap(strata[j][i], strata[j][rng.uniform_int(i + 1)]);
    }
    std::vector<Eigen::VectorXd> out(count, Eigen::VectorXd(d));
    for (int i = 0; i < count; ++i)
        for (int j = 0; j < d; ++j) {
            double u = (strata[j][i] + rng.uniform01()) / count;
            out[i](j) = box.lower(j) + u * (box.upper(j) - box.lower(j));
        }
    return out;
}

Eigen::VectorXd propose_next(const Kernel& kernel, const std::vector<Observation>& observations,
                             const HyperBox& box, const SearchParams& search, Rng& rng) {
    box.validate();
    GpPosterior posterior(kernel, observations);
    double incumbent = observations.front().value;
    for (const Observation& o : observations) incumbent = std::max(incumbent, o.value);

    const int d = box.dims();
    Eigen::VectorXd width = box.upper - box.lower;
    auto ei_at_unit = [&](const Eigen::VectorXd& unit) {
        Eigen::VectorXd theta = box.lower + width.cwiseProduct(unit);
        auto [mean, sd] = posterior.predict(theta);
        return expected_improvement(mean, sd, incumbent);
    };

    Eigen::VectorXd best_unit;
    double best_ei = -1.0;
    for (const Eigen::VectorXd& start : latin_hypercube(box, search.multistart, rng)) {
        Eigen::VectorXd unit(d);
        for (int i = 0; i < d; ++i) unit(i) = (start(i) - box.lower(i)) / width(i);
        double value = 0.0;
        Eigen::VectorXd top = ascend_unit(ei_at_unit, unit, search.ascent_steps, &value);
        if (value > best_ei) {
            best_ei = value;
            best_unit = top;
        }
    }
    if (best_ei <= 0.0) return box.sample(rng);  // flat EI: explore
    return box.clip(box.lower + width.cwiseProduct(best_unit));
}

TuneResult tune(const std::function<double(const Eigen::VectorXd&)>& evaluator,
                const HyperBox& box, const TuneParams& params, Rng& rng) {
    box.validate();
    if (params.initial_stages < 1 || params.initial_stages >= params.total_stages)
        throw std::invalid_argument("need 1 <= initial stages < total stages");

    TuneResult result;
    double incumbent = -std::numeric_limits<double>::infinity();
    auto run_stage = [&](int stage, const Eigen::VectorXd& theta) {
        TuneRecord rec;
        rec.stage = stage;
        rec.theta = theta;
        try {
            rec.value = evaluator(theta);
            rec.ok = true;
        } catch (const std::exception&) {
            rec.value = std::numeric_limits<double>::quiet_NaN();
        }
        if (rec.ok) {
            result.observations.push_back({theta, rec.value});
            incumbent = std::max(incumbent, rec.value);
        }
        rec.incumbent = incumbent;
        result.history.push_back(std::move(rec));
    };

    for (int l = 1; l <= params.initial_stages; ++l) run_stage(l, box.sample(rng));
    if (result.observations.empty())
        throw std::runtime_error("all initial evaluations failed");

    if (result.observations.size() >= 2) {
        KernelFit fit = fit_kernel_mle(result.observations, params.mle_restarts,
                                       MleBounds::from_observations(result.observations), rng);
        result.kernel = fit.kernel;
    } else {
        result.kernel.mean0 = result.observations.front().value;
        result.kernel.inv_lengthscale =
            (4.0 / (box.upper - box.lower).array().square()).matrix();
    }

    for (int l = params.initial_stages + 1; l <= params.total_stages; ++l)
        run_stage(l, propose_next(result.kernel, result.observations, box, params.search, rng));

    const Observation* best = &result.observations.front();
    for (const Observation& o : result.observations)
        if (o.value > best->value) best = &o;
    result.theta_star = best->theta;
    result.best_value = best->value;
    return result;
}

}  // namespace attnsim
