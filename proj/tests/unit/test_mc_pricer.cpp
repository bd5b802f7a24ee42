#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "cleanspread/errors.hpp"
#include "cleanspread/mc_pricer.hpp"
#include "oracles.hpp"

using namespace cleanspread;

namespace {

const double e2 = std::exp(2.0);

GridSpec small_grid() {
    GridSpec g;
    g.n_d = 7;
    g.n_c = 6;
    g.n_g = 6;
    g.n_e = 12;
    g.n_t = 40;
    return g;
}

const AllowanceSurface& small_surface() {
    static const SolveResult r = solve(ModelParams{}, small_grid());
    return r.surface;
}

SimulationConfig small_mc(int paths = 500) {
    SimulationConfig c;
    c.n_paths = paths;
    c.n_steps = 365;
    c.seed = 99;
    return c;
}

AllowanceModel structural() {
    AllowanceModel am;
    am.surface = &small_surface();
    return am;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same(const PathSet& a, const PathSet& b) {
    return same(a.demand, b.demand) && same(a.coal, b.coal) && same(a.gas, b.gas) && same(a.emissions, b.emissions) &&
           same(a.allowance, b.allowance) && same(a.price, b.price) && same(a.proxy, b.proxy) &&
           a.pre_reflection_hits == b.pre_reflection_hits;
}

}  // namespace

TEST(Simulate, MissingSurfaceIsConfigError) {
    AllowanceModel am;
    EXPECT_THROW(simulate(ModelParams{}, am, small_mc()), ConfigError);
}

TEST(Simulate, ParallelMatchesSerialForEveryVariant) {
    const ModelParams m;
    for (Variant v : {Variant::structural, Variant::gbm_allowance, Variant::gbm_emissions, Variant::tax}) {
        AllowanceModel am = structural();
        am.variant = v;
        am.initial_allowance = 50.0;
        am.emissions_initial = m.cap.cap;
        am.emissions_drift = 0.001;
        const PathSet a = simulate(m, am, small_mc());
        const PathSet b = simulate_reference(m, am, small_mc());
        EXPECT_TRUE(same(a, b)) << to_string(v);
    }
}

TEST(Simulate, ThreadCountDoesNotChangePaths) {
    const int before = omp_get_max_threads();
    omp_set_num_threads(1);
    const PathSet a = simulate(ModelParams{}, structural(), small_mc());
    omp_set_num_threads(4);
    const PathSet b = simulate(ModelParams{}, structural(), small_mc());
    omp_set_num_threads(before);
    EXPECT_TRUE(same(a, b));
}

TEST(Simulate, EmissionsMonotoneAndBounded) {
    const ModelParams m;
    const PathSet p = simulate(m, structural(), small_mc());
    const double emax = m.max_emissions();
    for (std::size_t path = 0; path < static_cast<std::size_t>(p.n_paths); ++path) {
        EXPECT_EQ(p.emissions[p.at(0, path)], 0.0);
        for (std::size_t r = 1; r < p.records(); ++r) {
            ASSERT_GE(p.emissions[p.at(r, path)], p.emissions[p.at(r - 1, path)]);
            ASSERT_LE(p.emissions[p.at(r, path)], emax);
            ASSERT_GE(p.allowance[p.at(r, path)], 0.0);
            ASSERT_LE(p.allowance[p.at(r, path)], m.cap.upper_bound(p.time(r)) + 1e-9);
            ASSERT_GE(p.demand[p.at(r, path)], 0.0);
            ASSERT_LE(p.demand[p.at(r, path)], m.capacity());
        }
    }
}

TEST(Simulate, RecordStrideKeepsLastStep) {
    SimulationConfig c = small_mc(10);
    c.record_stride = 7;
    const PathSet p = simulate(ModelParams{}, structural(), c);
    EXPECT_EQ(p.steps.back(), 365);
    EXPECT_EQ(p.steps[1], 7);
    EXPECT_DOUBLE_EQ(p.time(p.records() - 1), 1.0);
}

TEST(Simulate, DifferentCapsShareExogenousPathsUnderGbmEmissions) {
    // no feedback: emissions proxy and fuels do not depend on the cap
    ModelParams a, b;
    b.cap.cap = 1.8e8;
    b.cap.penalty = 40;
    AllowanceModel am;
    am.variant = Variant::gbm_emissions;
    am.emissions_initial = 1.4e8;
    am.emissions_drift = 0.002;
    const PathSet pa = simulate(a, am, small_mc(50));
    const PathSet pb = simulate(b, am, small_mc(50));
    EXPECT_TRUE(same(pa.proxy, pb.proxy));
    EXPECT_TRUE(same(pa.coal, pb.coal));
    EXPECT_TRUE(same(pa.demand, pb.demand));
}

TEST(Simulate, ZeroCapAllowanceIsDiscountedPenalty) {
    ModelParams m;
    m.cap.cap = 0.0;
    GridSpec spec = small_grid();
    spec.precision = Precision::f64;
    const SolveResult s = solve(m, spec);
    AllowanceModel am;
    am.surface = &s.surface;
    const PathSet p = simulate(m, am, small_mc(20));
    for (std::size_t r = 0; r < p.records(); ++r)
        for (std::size_t path = 0; path < 20; ++path)
            ASSERT_NEAR(p.allowance[p.at(r, path)], m.cap.upper_bound(p.time(r)), 1e-10);
}

TEST(Simulate, DeterministicTaxPathMatchesQuadrature) {
    ModelParams m;
    m.demand.vol_scale = 0.0;
    m.demand.seasonal_amplitude = 0.0;
    m.fuels.coal.vol = m.fuels.gas.vol = 0.0;
    AllowanceModel am;
    am.variant = Variant::tax;
    am.initial_allowance = 52.0;
    SimulationConfig c;
    c.n_paths = 1;
    c.n_steps = 200000;
    c.record_stride = c.n_steps;
    const PathSet p = simulate(m, am, c);
    const double e_t = p.emissions[p.at(p.records() - 1, 0)];
    const double ref = m.hours_per_year * oracle::trapezoid(
                                              [&](double t) {
                                                  return oracle::emissions(m.stack, 21000.0, 52.0 * std::exp(0.05 * t), e2, e2);
                                              },
                                              0.0, 1.0, 20000);
    EXPECT_NEAR(e_t / ref, 1.0, 1e-6);
}

TEST(ElectricityPrice, Examples) {
    const ModelParams m;
    EXPECT_NEAR(electricity_price(m.stack, {0, 0.0, e2, e2, 0, 0.0}), 3 * e2, 1e-12);
    EXPECT_NEAR(electricity_price(m.stack, {0, 30000.0, e2, e2, 0, 0.0}), 88.76, 5e-3);
    double prev = 0;
    for (double d = 0; d <= 30000; d += 1000) {
        const double p = electricity_price(m.stack, {0, d, 4.0, 9.0, 0, 30.0});
        EXPECT_GE(p, prev);
        prev = p;
    }
}

TEST(Estimator, HandComputedFixture) {
    const std::vector<double> v{1, 2, 3, 4, 10};
    const Estimate e = mean_and_standard_error(v);
    EXPECT_DOUBLE_EQ(e.mean, 4.0);
    ASSERT_TRUE(e.standard_error);
    EXPECT_NEAR(*e.standard_error, std::sqrt(2.5), 1e-15);
    const std::vector<double> one{3.0};
    EXPECT_FALSE(mean_and_standard_error(one).standard_error);
}

TEST(SpreadOption, DegenerateContracts) {
    const ModelParams m;
    const PathSet p = simulate(m, structural(), small_mc());
    const PlantSpec huge{"huge", Fuel::gas, 7.5, 0.43, 1e6};
    const SpreadQuote q0 = spread_option(p, huge, 0.05, 0.5);
    EXPECT_EQ(q0.value, 0.0);
    EXPECT_EQ(q0.standard_error.value_or(-1), 0.0);
    const PlantSpec forward{"fwd", Fuel::gas, 0.0, 0.0, 0.0};
    const std::size_t rec = p.nearest_record(0.5);
    double sum = 0;
    for (std::size_t path = 0; path < 500; ++path) sum += p.price[p.at(rec, path)];
    EXPECT_NEAR(spread_option(p, forward, 0.05, 0.5).value, std::exp(-0.05 * p.time(rec)) * sum / 500, 1e-9);
}

TEST(SpreadOption, MaturitySnapping) {
    const PathSet p = simulate(ModelParams{}, structural(), small_mc(10));
    const SpreadQuote q = spread_option(p, default_plants()[2], 0.05, 0.1234);
    EXPECT_NEAR(q.maturity, std::round(0.1234 * 365) / 365, 1e-12);
    EXPECT_NEAR(q.maturity_offset, q.maturity - 0.1234, 1e-15);
}

TEST(SpreadOption, PayoffMonotoneInContractTerms) {
    const PathSet p = simulate(ModelParams{}, structural(), small_mc(300));
    for (const PlantSpec& base : default_plants()) {
        const auto v0 = discounted_payoffs(p, base, 0.05, 0.6);
        PlantSpec h = base, e = base, k = base;
        h.heat_rate *= 1.1;
        e.emissions_rate *= 1.1;
        k.fixed_cost += 2.0;
        for (const PlantSpec* q : {&h, &e, &k}) {
            const auto v1 = discounted_payoffs(p, *q, 0.05, 0.6);
            for (std::size_t i = 0; i < v0.size(); ++i) ASSERT_LE(v1[i], v0[i]);
        }
    }
}

TEST(PlantValue, SingleMaturityAndAdditivity) {
    const PathSet p = simulate(ModelParams{}, structural(), small_mc(300));
    const PlantSpec g = default_plants()[3];
    const std::vector<double> one{0.4};
    EXPECT_DOUBLE_EQ(plant_value(p, g, 0.05, one).value, spread_option(p, g, 0.05, 0.4).value);
    const std::vector<double> m1{0.1, 0.3, 0.5}, m2{0.2, 0.7, 0.9}, all{0.1, 0.3, 0.5, 0.2, 0.7, 0.9};
    EXPECT_NEAR(plant_value(p, g, 0.05, all).value, plant_value(p, g, 0.05, m1).value + plant_value(p, g, 0.05, m2).value,
                1e-9);
    EXPECT_EQ(maturity_strip(p).size(), 365u);
}

TEST(SectorProfits, ZeroDemandEarnsNothing) {
    const ModelParams m;
    const PricePoint pt{40.0, 4.0, 7.0};
    const double p = market_bid(m.stack, 0.0, pt);
    EXPECT_NEAR(sector_profit_rate(m.stack, p, pt), 0.0, 1e-12);
}

TEST(SectorProfits, RevenueMinusCostMatchesSpreadIntegral) {
    const ModelParams m;
    const PathSet p = simulate(m, structural(), small_mc(200));
    for (std::size_t r = 0; r < p.records(); r += 5)
        for (std::size_t path = 0; path < 200; ++path) {
            const std::size_t q = p.at(r, path);
            const PricePoint pt{p.allowance[q], p.coal[q], p.gas[q]};
            const double a = sector_profit_rate(m.stack, p.price[q], pt);
            const double b = revenue_minus_cost(m.stack, p.demand[q], pt);
            ASSERT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
        }
}

TEST(SectorProfits, MatchesMarketQuadrature) {
    const ModelParams m;
    for (const PricePoint& pt : {PricePoint{52.0, e2, e2}, PricePoint{0.0, e2, e2}, PricePoint{90.0, 3.0, 12.0}}) {
        for (double d : {8000.0, 21000.0, 29000.0}) {
            const double p = market_bid(m.stack, d, pt);
            const double ref = p * d - oracle::stack_cost_quadrature(m.stack, d, pt.allowance, pt.coal, pt.gas, 200000);
            EXPECT_NEAR(sector_profit_rate(m.stack, p, pt), ref, 1e-6 * std::abs(ref));
        }
    }
}

TEST(SectorProfits, SeriesShape) {
    const ModelParams m;
    const PathSet p = simulate(m, structural(), small_mc(100));
    const ProfitSeries s = sector_profits(p, m);
    EXPECT_EQ(s.time.size(), p.records());
    double total = 0;
    for (double v : s.mean) {
        EXPECT_GE(v, 0.0);
        total += v;
    }
    EXPECT_NEAR(s.total, total, 1e-9 * total);
    EXPECT_LT(s.discounted_total, s.total);
}

TEST(PlantSpec, Validation) {
    EXPECT_THROW((PlantSpec{"x", Fuel::gas, 0.0, 0.4, 0.0}.validate()), ConfigError);
    EXPECT_THROW((PlantSpec{"x", Fuel::gas, 7.0, 0.4, -1.0}.validate()), ConfigError);
    for (const PlantSpec& p : default_plants()) EXPECT_NO_THROW(p.validate());
}
