#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qdot/presets.hpp"
#include "qdot/resonance.hpp"
#include "qdot/transfer_matrix.hpp"

using namespace qdot;

namespace {

// Hand-built mesh from (width, V, m) segments, no layer metadata.
PotentialMesh segments(const std::vector<std::array<double, 3>>& segs) {
    PotentialMesh m;
    m.edges.push_back(0.0);
    double x = 0.0;
    for (const auto& s : segs) {
        x += s[0];
        m.edges.push_back(x);
        m.positions.push_back(x - 0.5 * s[0]);
        m.potential.push_back(s[1]);
        m.mass.push_back(s[2]);
    }
    return m;
}

// Barrier split into n equal cells between two contact strips.
PotentialMesh barrier_mesh(double v0, double width, double mass, int n_barrier = 8) {
    std::vector<std::array<double, 3>> segs;
    segs.push_back({2.0, 0.0, mass});
    for (int i = 0; i < n_barrier; ++i)
        segs.push_back({width / n_barrier, v0, mass});
    segs.push_back({2.0, 0.0, mass});
    return segments(segs);
}

}  // namespace

TEST_CASE("local wavevector branches") {
    CHECK(local_wavevector(1.3, 1.3, 0.2) == complexd{0.0, 0.0});
    const auto k1 = local_wavevector(3.05, 0.0, 0.2);
    CHECK(k1.imag() == 0.0);
    CHECK(k1.real() == doctest::Approx(4.00).epsilon(1e-3));
    const auto k2 = local_wavevector(0.0, 3.05, 0.2);
    CHECK(k2.real() == 0.0);
    CHECK(k2.imag() == doctest::Approx(4.00).epsilon(1e-3));
    CHECK_THROWS_AS(local_wavevector(1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("free propagation keeps unit amplitude") {
    const auto mesh = segments({{3.0, 0.2, 0.4}, {5.0, 0.2, 0.4}, {2.0, 0.2, 0.4}});
    for (double e : {0.5, 1.0, 2.7}) {
        const auto amp = propagate(mesh, e);
        CHECK(std::abs(amp.A) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(amp.B) == 0.0);
        CHECK(transmission(mesh, e) == doctest::Approx(1.0).epsilon(1e-14));
        for (const auto& a : interior_amplitudes(mesh, e)) {
            CHECK(std::abs(a.A) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(a.B) < 1e-13);
        }
    }
}

TEST_CASE("no propagating channel means zero transmission") {
    const auto mesh = segments({{3.0, 1.0, 0.2}, {2.0, 0.5, 0.2}, {3.0, 1.0, 0.2}});
    CHECK(transmission(mesh, 0.8) == 0.0);   // below both contact edges
    CHECK(transmission(mesh, 1.0) == 0.0);   // exactly at the edge, k = 0
}

TEST_CASE("single rectangular barrier matches the closed form") {
    for (double width : {1.0, 2.0, 3.0}) {
        const auto mesh = barrier_mesh(3.1, width, 0.2);
        for (int i = 0; i < 60; ++i) {
            const double e = 0.01 + (3.0 - 0.01) * (i + 0.5) / 60.0;
            const double t = transmission(mesh, e);
            const double ref = oracle::rectangular_barrier_t(e, 3.1, width, 0.2);
            CHECK(std::abs(t - ref) <= 1e-8 * ref);
        }
    }
}

TEST_CASE("mass step keeps flux conservation and the flux-ratio factor") {
    // different contact masses: T uses (k/m) ratios
    const auto mesh = segments({{3.0, 0.0, 0.2}, {1.5, 2.0, 0.3}, {3.0, 0.1, 0.5}});
    for (double e : {0.4, 0.9, 1.7}) {
        const double t = transmission(mesh, e);
        const double r = reflection(mesh, e);
        CHECK(t + r == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("flux conservation on the device stack") {
    const auto g = presets::qubit_stack();
    const auto mesh = build_potential(g, 0.12, {1.0, 0.0}, 700);
    for (double e : {0.01, 0.035, 0.06, 0.11}) {
        const double t = transmission(mesh, e);
        const double r = reflection(mesh, e);
        CHECK(std::abs(t + r - 1.0) < 1e-6);
    }
}

TEST_CASE("reciprocity under mesh mirroring") {
    auto mesh = segments({{2.0, 0.0, 0.2},
                          {1.2, 3.1, 0.2},
                          {4.0, 0.3, 0.25},
                          {0.8, 2.5, 0.2},
                          {2.0, 0.0, 0.2}});
    PotentialMesh rev;
    rev.edges.push_back(0.0);
    double x = 0.0;
    for (std::size_t j = mesh.size(); j-- > 0;) {
        x += mesh.width(j);
        rev.edges.push_back(x);
        rev.positions.push_back(x - 0.5 * mesh.width(j));
        rev.potential.push_back(mesh.potential[j]);
        rev.mass.push_back(mesh.mass[j]);
    }
    for (double e : {0.5, 1.1, 2.2}) {
        const double t1 = transmission(mesh, e);
        const double t2 = transmission(rev, e);
        CHECK(std::abs(t1 - t2) <= 1e-8 * std::max(t1, t2));
    }
}

TEST_CASE("flux is uniform through the interior solution") {
    const auto mesh = segments({{2.0, 0.0, 0.2},
                                {1.0, 3.1, 0.2},
                                {5.0, 0.0, 0.2},
                                {1.0, 3.1, 0.2},
                                {2.0, 0.0, 0.2}});
    const double e = 0.06;
    const auto amps = interior_amplitudes(mesh, e);
    const double t = transmission(mesh, e);
    const double q0 = amps.front().k.real() / mesh.mass.front();
    for (std::size_t j = 0; j < mesh.size(); ++j) {
        if (amps[j].k.imag() != 0.0) continue;  // flux form differs in evanescent cells
        const double q = amps[j].k.real() / mesh.mass[j];
        const double flux = q * (std::norm(amps[j].A) - std::norm(amps[j].B));
        CHECK(flux / q0 == doctest::Approx(t).epsilon(1e-9));
    }
}

TEST_CASE("symmetric double barrier: resonance peak near the box level, T near 1") {
    const auto mesh = segments({{2.0, 0.0, 0.2},
                                {1.5, 3.1, 0.2},
                                {6.0, 0.0, 0.2},
                                {1.5, 3.1, 0.2},
                                {2.0, 0.0, 0.2}});
    const auto levels = find_resonances(mesh, 0.02, 0.10, 2e-4, 1e-10);
    REQUIRE(levels.size() >= 1);
    CHECK(levels[0].transmission_peak > 0.99);

    oracle::FdHamiltonian fd(mesh, 6000);
    const auto eigs = fd.eigenvalues_in(0.02, 0.10);
    REQUIRE(!eigs.empty());
    CHECK(std::abs(levels[0].energy_ev - eigs[0]) <
          std::max(1e-4, 0.01 * std::abs(eigs[0])));
}

TEST_CASE("isolated 6 nm well ground level agrees with the finite-difference oracle") {
    const auto mesh = segments({{2.0, 0.0, 0.2},
                                {5.0, 3.1, 0.2},
                                {6.0, 0.0, 0.2},
                                {5.0, 3.1, 0.2},
                                {2.0, 0.0, 0.2}});
    const auto levels = find_resonances(mesh, 0.02, 0.10, 1e-4, 1e-10);
    REQUIRE(!levels.empty());
    oracle::FdHamiltonian fd(mesh, 8000);
    const auto eigs = fd.eigenvalues_in(0.02, 0.10);
    REQUIRE(!eigs.empty());
    CHECK(std::abs(levels[0].energy_ev - eigs[0]) < 0.01 * eigs[0]);
}

TEST_CASE("wavefunction normalization and localization fractions") {
    const auto g = presets::qubit_stack();
    const auto mesh = build_potential(g, 0.02, {1.0, 0.0}, 700);
    ResonanceSearchOptions opt;
    opt.coarse_step_ev = 2e-4;
    opt.fine_step_ev = 1e-6;
    const auto levels = find_resonances(mesh, 0.01, 0.14, opt);
    REQUIRE(levels.size() >= 2);

    const auto* da = mesh.find_layer(LayerKind::dot_a);
    const auto* db = mesh.find_layer(LayerKind::dot_b);
    REQUIRE(da != nullptr);
    REQUIRE(db != nullptr);

    for (const auto& lvl : levels) {
        CHECK(lvl.f_a >= 0.0);
        CHECK(lvl.f_b >= 0.0);
        CHECK(lvl.f_a + lvl.f_b <= 1.0 + 1e-9);
        // Riemann sum of the center densities over the window
        double s = 0.0;
        for (std::size_t j = da->first_cell; j < db->first_cell + db->cell_count; ++j)
            s += lvl.density[j] * mesh.width(j);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-3));
    }
    // far below the crossing the ground state sits in the large dot
    CHECK(levels[0].f_a > 0.98);
    CHECK(levels[1].f_b > 0.98);
}

TEST_CASE("splitting shrinks when the inter-dot barrier widens") {
    auto coupled = [](double barrier_nm) {
        return segments({{2.0, 0.0, 0.2},
                         {2.5, 3.1, 0.2},
                         {5.0, 0.0, 0.2},
                         {barrier_nm, 3.1, 0.2},
                         {5.0, 0.0, 0.2},
                         {2.5, 3.1, 0.2},
                         {2.0, 0.0, 0.2}});
    };
    ResonanceSearchOptions opt;
    opt.fine_step_ev = 5e-8;  // the 2.5 nm barrier splits by only ~1e-6 eV
    auto lv1 = find_resonances(coupled(1.5), 0.02, 0.12, opt);
    auto lv2 = find_resonances(coupled(2.5), 0.02, 0.12, opt);
    REQUIRE(lv1.size() >= 2);
    REQUIRE(lv2.size() >= 2);
    const double d1 = level_splitting(lv1);
    const double d2 = level_splitting(lv2);
    CHECK(d2 < d1);
    CHECK(d1 > 0.0);

    CHECK_THROWS_AS(level_splitting({lv1[0]}), std::invalid_argument);
}

TEST_CASE("same splitting for identical levels is zero") {
    ResonanceLevel a, b;
    a.energy_ev = 0.05;
    b.energy_ev = 0.05;
    CHECK(level_splitting({a, b}) == 0.0);
}

TEST_CASE("transmission stays inside [0, 1 + tol] across meshes and energies") {
    const auto g = presets::qubit_stack();
    std::vector<PotentialMesh> meshes;
    meshes.push_back(build_potential(g, 0.0, {0.0, 0.0}, 420));
    meshes.push_back(build_potential(g, 0.12, {1.0, 0.0}, 420));
    meshes.push_back(barrier_mesh(3.1, 1.5, 0.2));
    meshes.push_back(segments({{2.0, 0.0, 0.2},
                               {1.0, 3.1, 0.3},
                               {5.0, -0.2, 0.2},
                               {1.0, 3.1, 0.3},
                               {2.0, 0.0, 0.2}}));
    for (const auto& mesh : meshes) {
        const auto sp = transmission_spectrum(mesh, 1e-3, 3.0, 7e-3);
        for (std::size_t i = 0; i < sp.transmission.size(); ++i) {
            CHECK(sp.transmission[i] >= 0.0);
            CHECK(sp.transmission[i] <= 1.0 + 1e-6);
            if (i) CHECK(sp.energies_ev[i] > sp.energies_ev[i - 1]);
        }
    }
}

TEST_CASE("deep in a localization region the window holds the whole state") {
    const auto g = presets::qubit_stack();
    const auto mesh = build_potential(g, 0.02, {1.0, 0.0}, 700);
    ResonanceSearchOptions opt;
    const auto levels = find_resonances(mesh, 0.01, 0.14, opt);
    REQUIRE(!levels.empty());
    CHECK(levels[0].f_a + levels[0].f_b > 0.99);
}

TEST_CASE("parallel and serial scans produce identical spectra and peaks") {
    const auto g = presets::qubit_stack();
    const auto mesh = build_potential(g, 0.1, {1.0, 0.0}, 500);
    const auto s1 = transmission_spectrum(mesh, 0.01, 0.12, 5e-4, 1);
    const auto s4 = transmission_spectrum(mesh, 0.01, 0.12, 5e-4, 4);
    CHECK(s1.transmission == s4.transmission);

    ResonanceSearchOptions o1, o4;
    o1.threads = 1;
    o4.threads = 4;
    const auto l1 = find_resonances(mesh, 0.01, 0.12, o1);
    const auto l4 = find_resonances(mesh, 0.01, 0.12, o4);
    REQUIRE(l1.size() == l4.size());
    for (std::size_t i = 0; i < l1.size(); ++i)
        CHECK(l1[i].energy_ev == l4[i].energy_ev);
}

TEST_CASE("deterministic: repeated evaluation is bit-identical") {
    const auto g = presets::qubit_stack();
    const auto mesh = build_potential(g, 0.07, {0.0, 1.0}, 600);
    const double t1 = transmission(mesh, 0.0423);
    const double t2 = transmission(mesh, 0.0423);
    CHECK(t1 == t2);
}
