#include "doctest.h"

#include "helpers.hpp"
#include "nonloc/error.hpp"
#include "nonloc/operators.hpp"

#include <cmath>
#include <random>

using namespace nonloc;
using namespace testutil;

namespace {

DomainPtr small_domain() { return build_domain(-1.0, 1.0, 1.0, 7); }

DomainPtr medium_domain() { return build_domain(-1.0, 1.0, 1.0, 101); }

KernelTable gaussian_on(const DomainPtr& d) { return sample_kernel(d, KernelSpec{}); }

/// Random symmetric nonnegative two-point kernel (not translation invariant).
KernelTable random_two_point(const DomainPtr& d, std::mt19937_64& gen) {
    const std::size_t m = d->node_count();
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> vals(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = dist(gen);
            vals[i * m + j] = v;
            vals[j * m + i] = v;
        }
    return KernelTable::two_point_from_samples(d, vals);
}

} // namespace

TEST_SUITE("operators") {

TEST_CASE("hat field is exactly antisymmetric with zero diagonal") {
    DomainPtr d = small_domain();
    auto gen = rng(21);
    const GridFunction u = random_grid_function(d, gen, 5.0);
    const TwoPointField h = hat(u);
    for (std::size_t i = 0; i < d->node_count(); ++i) {
        CHECK(h.at(i, i) == 0.0);
        for (std::size_t j = 0; j < d->node_count(); ++j)
            CHECK(h.at(i, j) == -h.at(j, i)); // IEEE subtraction negates exactly
    }
}

TEST_CASE("operators match a naive triple-loop evaluation on a tiny grid") {
    DomainPtr d = small_domain();
    auto gen = rng(22);
    const KernelTable alpha = random_two_point(d, gen);
    const GridFunction u = random_grid_function(d, gen, 2.0);
    const std::size_t m = d->node_count();

    const TwoPointField g = nonlocal_gradient(u, alpha);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            CHECK(g.at(i, j) ==
                  doctest::Approx((u[j] - u[i]) * alpha.at(i, j)).epsilon(1e-15));

    const GridFunction div = nonlocal_divergence(g, alpha);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            acc += d->weight(j) *
                   (g.at(i, j) * alpha.at(i, j) - g.at(j, i) * alpha.at(j, i));
        CHECK(div[i] == doctest::Approx(acc).epsilon(1e-13));
    }

    const GridFunction lap = nonlocal_laplacian(u, alpha);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            acc += 2.0 * d->weight(j) * (u[j] - u[i]) * alpha.at(i, j);
        CHECK(lap[i] == doctest::Approx(acc).epsilon(1e-13));
    }

    const double p = 3.5;
    const GridFunction plap = nonlocal_p_laplacian(u, alpha, p);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double du = u[j] - u[i];
            if (du == 0.0) continue;
            acc += 2.0 * d->weight(j) * std::pow(std::abs(du), p - 2.0) * du *
                   std::pow(alpha.at(i, j), p);
        }
        CHECK(plap[i] == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("divergence of the gradient is the laplacian with the squared kernel") {
    DomainPtr d = medium_domain();
    auto gen = rng(23);
    const KernelTable alpha = gaussian_on(d);
    const KernelTable alpha2 = squared_kernel(alpha);
    for (int trial = 0; trial < 50; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 2.0);
        const GridFunction composed = nonlocal_divergence(nonlocal_gradient(u, alpha), alpha);
        const GridFunction direct = nonlocal_laplacian(u, alpha2);
        CHECK(linf_diff(composed, direct) < 1e-13);
    }
}

TEST_CASE("composition identity holds for generic symmetric kernels too") {
    DomainPtr d = build_domain(-1.0, 1.0, 0.5, 31);
    auto gen = rng(24);
    const KernelTable alpha = random_two_point(d, gen);
    const KernelTable alpha2 = squared_kernel(alpha);
    for (int trial = 0; trial < 50; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 2.0);
        const GridFunction composed = nonlocal_divergence(nonlocal_gradient(u, alpha), alpha);
        const GridFunction direct = nonlocal_laplacian(u, alpha2);
        CHECK(linf_diff(composed, direct) < 1e-13);
    }
}

TEST_CASE("constants are annihilated") {
    DomainPtr d = medium_domain();
    const KernelTable mu = gaussian_on(d);
    GridFunction c(d);
    for (std::size_t i = 0; i < d->node_count(); ++i) c[i] = 7.25;

    CHECK(linf_norm(nonlocal_laplacian(c, mu)) <= 1e-14);
    CHECK(linf_norm(nonlocal_p_laplacian(c, mu, 3.0)) <= 1e-14);
    CHECK(linf_norm(nonlocal_divergence(nonlocal_gradient(c, mu), mu)) <= 1e-14);
    const TwoPointField g = nonlocal_gradient(c, mu);
    for (double v : g.values()) CHECK(v == 0.0);
}

TEST_CASE("laplacian is linear") {
    DomainPtr d = medium_domain();
    auto gen = rng(25);
    const KernelTable mu = gaussian_on(d);
    const GridFunction u = random_grid_function(d, gen);
    const GridFunction v = random_grid_function(d, gen);
    GridFunction lin(d);
    for (std::size_t i = 0; i < d->node_count(); ++i) lin[i] = 2.0 * u[i] - 3.0 * v[i];

    const GridFunction lu = nonlocal_laplacian(u, mu);
    const GridFunction lv = nonlocal_laplacian(v, mu);
    const GridFunction llin = nonlocal_laplacian(lin, mu);
    double worst = 0.0;
    for (std::size_t i = 0; i < d->node_count(); ++i)
        worst = std::max(worst, std::abs(llin[i] - (2.0 * lu[i] - 3.0 * lv[i])));
    CHECK(worst < 1e-12);
}

TEST_CASE("p = 2 reduces the p-laplacian to the squared-kernel laplacian") {
    DomainPtr d = medium_domain();
    auto gen = rng(26);
    const KernelTable mu = gaussian_on(d);
    const KernelTable mu2 = squared_kernel(mu);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 2.0);
        CHECK(linf_diff(nonlocal_p_laplacian(u, mu, 2.0), nonlocal_laplacian(u, mu2)) <
              1e-13);
    }
}

TEST_CASE("p <= 1 is a parameter error") {
    DomainPtr d = small_domain();
    const KernelTable mu = gaussian_on(d);
    GridFunction u(d);
    CHECK_THROWS_AS(nonlocal_p_laplacian(u, mu, 1.0), Error);
    try {
        nonlocal_p_laplacian(u, mu, 0.5);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Param);
    }
}

TEST_CASE("mismatched grids and vector-valued inputs are rejected") {
    DomainPtr d = small_domain();
    DomainPtr other = build_domain(-1.0, 1.0, 1.0, 9);
    const KernelTable mu = gaussian_on(d);
    GridFunction u_other(other);
    CHECK_THROWS_AS(nonlocal_laplacian(u_other, mu), Error);
    GridFunction vec(d, 2);
    CHECK_THROWS_AS(nonlocal_laplacian(vec, mu), Error);
}

TEST_CASE("convolution sifts a scaled nodal indicator into kernel samples") {
    DomainPtr d = medium_domain();
    const KernelTable mu = gaussian_on(d);
    const std::size_t k = 37;
    GridFunction delta(d);
    delta[k] = 1.0 / d->weight(k);
    const GridFunction conv = convolve(delta, mu);
    for (std::size_t i = 0; i < d->node_count(); ++i)
        CHECK(conv[i] == doctest::Approx(mu.at(i, k)).epsilon(1e-13));
}

TEST_CASE("laplacian equals twice convolution minus local mass") {
    DomainPtr d = medium_domain();
    auto gen = rng(27);
    const KernelTable mu = gaussian_on(d);
    GridFunction ones(d);
    for (std::size_t i = 0; i < d->node_count(); ++i) ones[i] = 1.0;
    const GridFunction mass = convolve(ones, mu);

    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 2.0);
        const GridFunction conv = convolve(u, mu);
        const GridFunction lap = nonlocal_laplacian(u, mu);
        double worst = 0.0;
        for (std::size_t i = 0; i < d->node_count(); ++i)
            worst = std::max(worst, std::abs(lap[i] - 2.0 * (conv[i] - u[i] * mass[i])));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("fft convolution path agrees with the direct sum") {
    if (!fft_convolve_available()) {
        DomainPtr d = small_domain();
        const KernelTable mu = gaussian_on(d);
        GridFunction u(d);
        CHECK_THROWS_AS(convolve(u, mu, ConvolveMethod::Fft), Error);
        return;
    }
    DomainPtr d = medium_domain();
    auto gen = rng(28);
    const KernelTable mu = gaussian_on(d);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 3.0);
        CHECK(linf_diff(convolve(u, mu, ConvolveMethod::Direct),
                        convolve(u, mu, ConvolveMethod::Fft)) < 1e-10);
    }
}

TEST_CASE("convolution obeys the l1/linf bound") {
    DomainPtr d = medium_domain();
    auto gen = rng(29);
    const KernelTable mu = gaussian_on(d);
    double mu_inf = 0.0;
    for (double v : mu.samples()) mu_inf = std::max(mu_inf, std::abs(v));
    for (int trial = 0; trial < 100; ++trial) {
        const GridFunction u = random_grid_function(d, gen, 4.0);
        const double lhs = linf_norm(convolve(u, mu));
        const double bound = lp_norm(u, 1.0) * mu_inf;
        CHECK(lhs <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("two-point kernels are rejected by convolve") {
    DomainPtr d = small_domain();
    auto gen = rng(30);
    const KernelTable alpha = random_two_point(d, gen);
    GridFunction u(d);
    CHECK_THROWS_AS(convolve(u, alpha), Error);
}

} // TEST_SUITE
