#include <gtest/gtest.h>

#include <cmath>

#include "latsym/errors.hpp"
#include "latsym/finder/catalog_runs.hpp"
#include "latsym/symmetry/prolong.hpp"
#include "oracles.hpp"

using namespace latsym;
using namespace latsym::finder;

namespace {

SymmetryBasis run(const catalog::CatalogEntry& e, std::uint64_t seed = 1, int samples = 0) {
    auto opts = options_for(e);
    opts.seed = seed;
    opts.samples = samples;
    return find_symmetries(e.scheme, ansatz_for(e), opts);
}

VectorField as_field(const SymmetryBasis& b, const std::string& text) {
    return VectorField::from_text(text, b.basis);
}

}  // namespace

class ReferenceRun : public ::testing::TestWithParam<int> {};

TEST_P(ReferenceRun, DimensionsOracleAndSoundness) {
    const auto e = catalog::reference_runs()[static_cast<std::size_t>(GetParam())];
    SCOPED_TRACE(e.label);
    const auto b = run(e);

    // the finite count of the constant Lorentz interaction includes (u - x*y) du
    const int finite = e.label == "lorentz[f=constant]" ? 5 : e.expected_finite;
    EXPECT_EQ(b.dimension(Sector::Finite), finite);
    const int sup = oracle::polynomial_superposition_count(e, 2, 2);
    EXPECT_EQ(b.dimension(Sector::Superposition), sup);
    if (e.expected_superposition >= 0) EXPECT_EQ(sup, e.expected_superposition);

    for (const auto& f : e.oracle()) {
        auto v = VectorField::from_components(f.xi, f.tau, f.phi, b.basis, e.scheme.params());
        EXPECT_LE(project(v, b.fields).second, 1e-6) << f.name;
    }
    for (const auto& f : e.excluded) {
        try {
            auto v = VectorField::from_components(f.xi, f.tau, f.phi, b.basis, e.scheme.params());
            EXPECT_GT(project(v, b.fields).second, 1e-3) << f.name;
        } catch (const SpanEscape&) {
        }
    }

    auto held_out = e.sampling;
    held_out.seed = 987654321;
    for (double r : verify_fields(e.scheme, b.fields, held_out, 100)) EXPECT_LE(r, 1e-7);

    EXPECT_LE(b.annihilation, 1e-8);

    // independent dense nullspace at doubled sample count
    const auto twice = run(e, 99, 2 * b.samples);
    EXPECT_EQ(twice.size(), b.size());
    EXPECT_LT(max_principal_angle(twice.fields, b.fields), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(References, ReferenceRun, ::testing::Range(0, 11));

TEST(Finder, HeatFixedReadableBasis) {
    const auto b = run(catalog::instantiate("heat_fixed"));
    ASSERT_EQ(b.size(), 6u);
    auto split = split_sectors(b);
    ASSERT_EQ(split.finite.size(), 3u);
    ASSERT_EQ(split.superposition.size(), 3u);
    std::vector<std::string> finite = {"xi = 1; tau = 0; phi = 0", "xi = 0; tau = 1; phi = 0", "xi = 0; tau = 0; phi = u"};
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(split.finite[k].to_text(1e-9), finite[k]);
    EXPECT_LT(project(as_field(b, "phi = x^2 + 2*t"), split.superposition).second, 1e-9);
    EXPECT_LT(project(as_field(b, "phi = x"), split.superposition).second, 1e-9);
}

TEST(Finder, Determinism) {
    const auto e = catalog::instantiate("burgers_potential");
    const auto a = run(e, 17), b = run(e, 17);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        Eigen::VectorXd d = a.fields[k].stacked() - b.fields[k].stacked();
        EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_EQ(a.singular_values, b.singular_values);
}

TEST(Finder, EnlargingTheAnsatzNeverLosesFields) {
    const auto e = catalog::instantiate("heat_fixed");
    auto opts = options_for(e);
    int previous = 0;
    for (int d = 0; d <= 2; ++d) {
        auto b = find_symmetries(e.scheme, ansatz_for(e, d, d, 1), opts);
        EXPECT_GE(static_cast<int>(b.size()), previous);
        previous = static_cast<int>(b.size());
    }
    EXPECT_EQ(previous, 6);
}

TEST(Finder, ScalingRobustness) {
    auto e = catalog::instantiate("heat_galilei");
    const auto a = run(e);
    e.sampling.ranges[2] = {-20.0, 20.0};
    const auto b = run(e);
    EXPECT_LT(max_principal_angle(a.fields, b.fields), 1e-6);
}

TEST(Finder, LatticeFieldsMayDependOnU) {
    const auto e = catalog::instantiate("heat_fixed");
    auto opts = options_for(e);
    opts.u_dependent_lattice = true;
    auto basis = ansatz_for(e);
    auto b = find_symmetries(e.scheme, basis, opts);
    EXPECT_EQ(b.coefficients, 54);
    EXPECT_EQ(b.size(), 6u);
}

TEST(Finder, TooFewSamples) {
    const auto e = catalog::instantiate("heat_fixed");
    auto opts = options_for(e);
    opts.samples = 20;
    EXPECT_THROW(find_symmetries(e.scheme, ansatz_for(e), opts), std::invalid_argument);
}

TEST(Finder, LightConeAnsatzMustMatch) {
    const auto e = catalog::instantiate("lorentz");
    EXPECT_THROW(find_symmetries(e.scheme, std::make_shared<AnsatzBasis>(1, 1, 1), options_for(e)),
                 std::invalid_argument);
}

TEST(Structure, BurgersDilation) {
    auto basis = std::make_shared<AnsatzBasis>(2, 2, 1);
    std::vector<VectorField> f = {VectorField::from_text("xi = 1", basis),
                                  VectorField::from_text("xi = x; tau = 2*t; phi = -u", basis)};
    auto sc = structure_constants(f);
    EXPECT_LE(sc.closure_residual, 1e-10);
    EXPECT_NEAR(sc.c[0][1][0], 1.0, 1e-12);
    EXPECT_NEAR(sc.c[0][1][1], 0.0, 1e-12);
    EXPECT_NEAR(sc.c[1][0][0], -1.0, 1e-12);
}

TEST(Structure, GalileiNeedsTranslation) {
    auto basis = std::make_shared<AnsatzBasis>(2, 2, 1);
    auto p0 = VectorField::from_text("tau = 1", basis);
    auto boost = VectorField::from_text("xi = t", basis);
    auto p1 = VectorField::from_text("xi = 1", basis);
    EXPECT_GT(structure_constants({p0, boost}).closure_residual, 1e-6);
    auto sc = structure_constants({p0, p1, boost, VectorField::from_text("phi = u", basis)});
    EXPECT_LE(sc.closure_residual, 1e-10);
    EXPECT_NEAR(sc.c[0][2][1], 1.0, 1e-12);
}

TEST(Structure, NonClosedSetIsFlagged) {
    auto basis = std::make_shared<AnsatzBasis>(2, 0, 0);
    auto sc = structure_constants({VectorField::from_text("xi = 1", basis), VectorField::from_text("xi = x^2", basis)});
    EXPECT_GT(sc.closure_residual, 1e-6);
    EXPECT_FALSE(sc.closed());
}

TEST(Structure, FoundGalileiAlgebra) {
    const auto b = run(catalog::instantiate("heat_galilei"));
    auto finite = b.in_sector(Sector::Finite);
    auto sc = structure_constants(finite);
    EXPECT_LE(sc.closure_residual, 1e-8);
    auto idx = [&](const std::string& n) {
        for (std::size_t k = 0; k < b.names.size(); ++k) {
            if (b.names[k] == n) return k;
        }
        return b.names.size();
    };
    const auto i0 = idx("P0"), ib = idx("B"), i1 = idx("P1");
    ASSERT_LT(i0, finite.size());
    ASSERT_LT(ib, finite.size());
    ASSERT_LT(i1, finite.size());
    for (std::size_t k = 0; k < finite.size(); ++k) EXPECT_NEAR(sc.c[i0][ib][k], k == i1 ? 1.0 : 0.0, 1e-8);
}

TEST(Sectors, SplitOfArbitrarySpanningSet) {
    auto basis = std::make_shared<AnsatzBasis>(2, 2, 1);
    std::vector<VectorField> mixed = {VectorField::from_text("xi = 1; phi = 1", basis),
                                      VectorField::from_text("phi = x + u", basis),
                                      VectorField::from_text("phi = 1", basis),
                                      VectorField::from_text("phi = x", basis)};
    auto s = split_sectors(mixed);
    EXPECT_EQ(s.finite.size(), 2u);
    EXPECT_EQ(s.superposition.size(), 2u);
    EXPECT_EQ(s.finite[0].to_text(1e-9), "xi = 1; tau = 0; phi = 0");
    EXPECT_EQ(s.finite[1].to_text(1e-9), "xi = 0; tau = 0; phi = u");
}
