#include "nonloc/operators.hpp"

#include "nonloc/error.hpp"
#include "nonloc/kernels.hpp"
#include "nonloc/parallel.hpp"

#include <cmath>

#ifdef NONLOC_HAVE_FFTW
#include <fftw3.h>
#include <mutex>
#endif

namespace nonloc {

namespace {

void require_operand(const GridFunction& u, const char* who) {
    if (!u.domain()) throw_config(std::string(who) + ": function has no domain");
    if (u.components() != 1)
        throw_param(std::string(who) + ": single-component function required");
}

void require_same_grid(const Domain& a, const Domain& b, const char* who) {
    if (!a.same_grid_as(b))
        throw_param(std::string(who) + ": operands live on different grids");
}

double pow_entry(double v, double p) { return std::pow(v, p); }

double square_entry(double v, double) { return v * v; }

} // namespace

TwoPointField::TwoPointField(DomainPtr d, std::vector<double> values)
    : domain_(std::move(d)) {
    if (!domain_) throw_config("two-point field: null domain");
    m_ = domain_->node_count();
    if (values.size() != m_ * m_) throw_config("two-point field: values must be MxM");
    values_ = std::move(values);
}

TwoPointField::TwoPointField(DomainPtr d) : domain_(std::move(d)) {
    if (!domain_) throw_config("two-point field: null domain");
    m_ = domain_->node_count();
    values_.assign(m_ * m_, 0.0);
}

TwoPointField hat(const GridFunction& u) {
    require_operand(u, "hat");
    const std::size_t m = u.domain()->node_count();
    TwoPointField out(u.domain());
    const double* uv = u.data();
    parallel_for(m, [&](std::size_t i) {
        double* r = out.row(i);
        const double ui = uv[i];
        for (std::size_t j = 0; j < m; ++j) r[j] = uv[j] - ui;
    });
    return out;
}

TwoPointField nonlocal_gradient(const GridFunction& u, const KernelTable& alpha) {
    require_operand(u, "nonlocal_gradient");
    require_same_grid(*u.domain(), *alpha.domain(), "nonlocal_gradient");
    const std::size_t m = u.domain()->node_count();
    TwoPointField out(u.domain());
    const double* uv = u.data();
    parallel_for(m, [&](std::size_t i) {
        double* r = out.row(i);
        const double* a = alpha.row(i);
        const double ui = uv[i];
        for (std::size_t j = 0; j < m; ++j) r[j] = (uv[j] - ui) * a[j];
    });
    return out;
}

GridFunction nonlocal_divergence(const TwoPointField& F, const KernelTable& alpha) {
    if (!F.domain()) throw_config("nonlocal_divergence: field has no domain");
    require_same_grid(*F.domain(), *alpha.domain(), "nonlocal_divergence");
    const Domain& d = *F.domain();
    const std::size_t m = d.node_count();
    const KernelBackend& kb = active_backend();

    // P(i,j) = F(i,j) * alpha(i,j), built row-wise
    TwoPointField P(F.domain());
    parallel_for(m, [&](std::size_t i) {
        kb.mul(P.row(i), F.row(i), alpha.row(i), m);
    });

    GridFunction out(F.domain());
    const double* w = d.weights().data();

    // outgoing part: per-row weighted sum, independent across i
    parallel_for(m, [&](std::size_t i) { out[i] = kb.wdot(w, P.row(i), m); });

    // incoming part sum_j w_j P(j,i): accumulate rows in fixed j order so the
    // result does not depend on the thread count
    std::vector<double> incoming(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) kb.axpy(incoming.data(), w[j], P.row(j), m);
    for (std::size_t i = 0; i < m; ++i) out[i] -= incoming[i];
    return out;
}

GridFunction nonlocal_laplacian(const GridFunction& u, const KernelTable& kappa) {
    require_operand(u, "nonlocal_laplacian");
    require_same_grid(*u.domain(), *kappa.domain(), "nonlocal_laplacian");
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();
    const KernelBackend& kb = active_backend();
    GridFunction out(u.domain());
    const double* w = d.weights().data();
    const double* uv = u.data();
    parallel_for(m, [&](std::size_t i) {
        const double s = kb.wdiffdot(w, uv, kappa.row(i), uv[i], m);
        out[i] = s + s;
    });
    return out;
}

GridFunction nonlocal_p_laplacian(const GridFunction& u, const KernelTable& mu, double p) {
    require_operand(u, "nonlocal_p_laplacian");
    require_same_grid(*u.domain(), *mu.domain(), "nonlocal_p_laplacian");
    if (!(p > 1.0)) throw_param("nonlocal_p_laplacian: p must exceed 1");
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();

    const KernelTable mup = mu.map(&pow_entry, p);

    GridFunction out(u.domain());
    const double* w = d.weights().data();
    const double* uv = u.data();
    const double pm2 = p - 2.0;
    parallel_for(m, [&](std::size_t i) {
        const double* mr = mup.row(i);
        const double ui = uv[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double du = uv[j] - ui;
            if (du == 0.0) continue;
            acc += w[j] * std::pow(std::abs(du), pm2) * du * mr[j];
        }
        out[i] = acc + acc;
    });
    return out;
}

namespace {

GridFunction convolve_direct(const GridFunction& u, const KernelTable& mu) {
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();
    const KernelBackend& kb = active_backend();

    // mu(x_i - y_j) = samples[(m-1) + i - j]; reversing the table turns the
    // per-row walk into a contiguous forward scan
    std::vector<double> rev(mu.samples().rbegin(), mu.samples().rend());

    GridFunction out(u.domain());
    const double* w = d.weights().data();
    const double* uv = u.data();
    parallel_for(m, [&](std::size_t i) {
        out[i] = kb.wdot3(w, uv, rev.data() + (m - 1 - i), m);
    });
    return out;
}

#ifdef NONLOC_HAVE_FFTW
GridFunction convolve_fft(const GridFunction& u, const KernelTable& mu) {
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();
    const std::size_t len = 3 * m - 2; // zero-padded linear convolution length
    const std::size_t half = len / 2 + 1;

    std::vector<double> a(len, 0.0), b(len, 0.0), c(len, 0.0);
    for (std::size_t j = 0; j < m; ++j) a[j] = d.weight(j) * u[j];
    for (std::size_t t = 0; t < 2 * m - 1; ++t) b[t] = mu.samples()[t];

    std::vector<fftw_complex> fa(half), fb(half);
    {
        // FFTW planning mutates global state
        static std::mutex plan_mutex;
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_plan pa = fftw_plan_dft_r2c_1d(static_cast<int>(len), a.data(), fa.data(),
                                            FFTW_ESTIMATE);
        fftw_plan pb = fftw_plan_dft_r2c_1d(static_cast<int>(len), b.data(), fb.data(),
                                            FFTW_ESTIMATE);
        fftw_execute(pa);
        fftw_execute(pb);
        for (std::size_t k = 0; k < half; ++k) {
            const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
            const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
            fa[k][0] = re;
            fa[k][1] = im;
        }
        fftw_plan pc = fftw_plan_dft_c2r_1d(static_cast<int>(len), fa.data(), c.data(),
                                            FFTW_ESTIMATE);
        fftw_execute(pc);
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }

    GridFunction out(u.domain());
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t i = 0; i < m; ++i) out[i] = c[i + m - 1] * scale;
    return out;
}
#endif

} // namespace

bool fft_convolve_available() {
#ifdef NONLOC_HAVE_FFTW
    return true;
#else
    return false;
#endif
}

GridFunction convolve(const GridFunction& u, const KernelTable& mu, ConvolveMethod method) {
    require_operand(u, "convolve");
    require_same_grid(*u.domain(), *mu.domain(), "convolve");
    if (!mu.translation_invariant())
        throw_param("convolve: translation-invariant kernel required");
    if (method == ConvolveMethod::Fft) {
#ifdef NONLOC_HAVE_FFTW
        return convolve_fft(u, mu);
#else
        throw_param("convolve: fft support not built");
#endif
    }
    return convolve_direct(u, mu);
}

KernelTable squared_kernel(const KernelTable& alpha) { return alpha.map(&square_entry, 0.0); }

} // namespace nonloc
