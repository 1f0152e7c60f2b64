#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "star/spline.hpp"

using namespace star;

namespace {

RawData two_way(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    RawData data;
    data.shape = {2, 3};
    data.x.resize(static_cast<Eigen::Index>(n), 6);
    data.y.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < data.x.size(); ++i) data.x.data()[i] = u(rng);
    for (Eigen::Index i = 0; i < data.y.size(); ++i) data.y[i] = u(rng);
    return data;
}

} // namespace

TEST_SUITE("spline")
{
    TEST_CASE("basis counts")
    {
        CHECK(build_basis(4, 4, false).size() == 8);
        CHECK(build_basis(4, 4, true).size() == 6);
        CHECK(build_basis(4, 4, true, true).size() == 5);
        CHECK(build_basis(2, 1, false).size() == 3);
        CHECK(SplineBasis::identity().size() == 1);
        const auto b = build_basis(4, 4, false);
        const std::vector<double> internal{0.2, 0.4, 0.6, 0.8};
        REQUIRE(b.internal_knots().size() == 4);
        for (std::size_t i = 0; i < 4; ++i) CHECK(b.internal_knots()[i] == doctest::Approx(internal[i]));
        CHECK(b.knots().size() == 12);
        CHECK_THROWS_AS(build_basis(3, 4, true), std::invalid_argument);
        CHECK_THROWS_AS(build_basis(0, 4, false), std::invalid_argument);
        CHECK_THROWS_AS(SplineBasis::bspline(4, {0.5, 0.3}), std::invalid_argument);
    }

    TEST_CASE("order-1 indicators")
    {
        const auto b = build_basis(1, 1, false);
        CHECK(eval_basis(b, 0.25) == std::vector<double>{1.0, 0.0});
        CHECK(eval_basis(b, 0.5) == std::vector<double>{0.0, 1.0});
        CHECK(eval_basis(b, 1.0) == std::vector<double>{0.0, 1.0});
    }

    TEST_CASE("linear hats")
    {
        const auto v = eval_basis(build_basis(2, 1, false), 0.25);
        REQUIRE(v.size() == 3);
        CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(v[1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(v[2] == 0.0);
    }

    TEST_CASE("cubic values match an independent evaluator")
    {
        // scipy.interpolate.BSpline on knots (0,0,0,0,.2,.4,.6,.8,1,1,1,1)
        const auto b = build_basis(4, 4, false);
        const std::vector<double> at03{0, 0.031250000000000028, 0.46875000000000006, 0.47916666666666663,
                                       0.020833333333333315, 0, 0, 0};
        const std::vector<double> at077{0, 0, 0, 0.00056250000000000126, 0.25122916666666667,
                                        0.59467708333333336, 0.15353125000000004, 0};
        const auto v03 = eval_basis(b, 0.3);
        const auto v077 = eval_basis(b, 0.77);
        for (std::size_t h = 0; h < 8; ++h) {
            CHECK(v03[h] == doctest::Approx(at03[h]).epsilon(1e-14));
            CHECK(v077[h] == doctest::Approx(at077[h]).epsilon(1e-14));
        }
        CHECK(eval_basis(b, 0.0)[0] == 1.0);
        CHECK(eval_basis(b, 1.0)[7] == 1.0);

        const std::vector<double> d2{0, 18.750000000000007, -18.750000000000014, -12.499999999999991,
                                     12.499999999999995, 0, 0, 0};
        const auto got = bspline_derivatives(b.knots(), 4, 0.3, 2);
        for (std::size_t h = 0; h < 8; ++h) CHECK(got[h] == doctest::Approx(d2[h]).epsilon(1e-12));

        const std::vector<double> knots3{0, 0, 0, 1.0 / 3, 2.0 / 3, 1, 1, 1};
        const auto q3 = bspline_values(knots3, 3, 0.5);
        const std::vector<double> expect3{0, 0.125, 0.75, 0.125, 0};
        for (std::size_t h = 0; h < 5; ++h) CHECK(q3[h] == doctest::Approx(expect3[h]).epsilon(1e-14));
    }

    TEST_CASE("partition of unity, bounds and local support")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int q = 1; q <= 5; ++q) {
            const auto b = build_basis(q, 4, false);
            const auto& t = b.knots();
            for (int s = 0; s < 1000; ++s) {
                const double x = u(rng);
                const auto v = eval_basis(b, x);
                CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) <= 1e-12);
                for (std::size_t h = 0; h < v.size(); ++h) {
                    CHECK(v[h] >= 0.0);
                    CHECK(v[h] <= 1.0);
                    if (x < t[h] || x >= t[h + static_cast<std::size_t>(q)]) CHECK(v[h] == 0.0);
                }
            }
        }
    }

    TEST_CASE("continuity")
    {
        for (int q = 2; q <= 4; ++q) {
            const auto b = build_basis(q, 4, false);
            for (double x : {0.2, 0.4, 0.6, 0.8, 0.33}) {
                const auto a = eval_basis(b, x - 1e-8);
                const auto c = eval_basis(b, x + 1e-8);
                for (std::size_t h = 0; h < a.size(); ++h) CHECK(std::abs(a[h] - c[h]) <= 1e-5);
            }
        }
    }

    TEST_CASE("natural basis constraints")
    {
        for (bool drop : {false, true}) {
            const auto b = build_basis(4, 4, true, drop);
            const double delta = 1e-5;
            // one-sided second differences at the boundaries
            const auto f0 = eval_basis(b, 0.0), f1 = eval_basis(b, delta), f2 = eval_basis(b, 2 * delta);
            const auto g0 = eval_basis(b, 1.0), g1 = eval_basis(b, 1.0 - delta), g2 = eval_basis(b, 1.0 - 2 * delta);
            for (std::size_t h = 0; h < b.size(); ++h) {
                CHECK(std::abs((f2[h] - 2 * f1[h] + f0[h]) / (delta * delta)) < 0.05);
                CHECK(std::abs((g2[h] - 2 * g1[h] + g0[h]) / (delta * delta)) < 0.05);
            }
            // the span keeps linear functions (and constants unless dropped)
            Eigen::MatrixXd A(41, static_cast<Eigen::Index>(b.size()));
            Eigen::VectorXd x(41);
            for (int i = 0; i <= 40; ++i) {
                x[i] = i / 40.0;
                const auto v = eval_basis(b, x[i]);
                for (std::size_t h = 0; h < v.size(); ++h) A(i, static_cast<Eigen::Index>(h)) = v[h];
                for (double vh : v) CHECK(std::abs(vh) <= 1.0 + 1e-12);
            }
            const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(x);
            CHECK((A * coef - x).norm() < 1e-10);
            const Eigen::VectorXd ones = Eigen::VectorXd::Ones(41);
            const Eigen::VectorXd c1 = A.colPivHouseholderQr().solve(ones);
            if (drop) {
                CHECK((A * c1 - ones).norm() > 1e-3);
            } else {
                CHECK((A * c1 - ones).norm() < 1e-10);
            }
        }
    }

    TEST_CASE("identity basis and clamping")
    {
        const auto id = SplineBasis::identity();
        CHECK(eval_basis(id, 0.3) == std::vector<double>{0.3});
        const auto b = build_basis(4, 4, false);
        CHECK(eval_basis(b, -0.5) == eval_basis(b, 0.0));
        CHECK(eval_basis(b, 1.5) == eval_basis(b, 1.0));
    }

    TEST_CASE("scaler examples")
    {
        RawData data;
        data.shape = {1, 2};
        data.x.resize(2, 2);
        data.x << 0.0, 3.0, 10.0, 3.0;
        data.y = Eigen::Vector2d(1.0, 2.0);
        const auto b = build_basis(2, 1, false);
        const auto s = fit_scaler(data, b);
        CHECK(s.min[0] == 0.0);
        CHECK(s.max[0] == 10.0);
        CHECK(s.scale(0, 0.0) == 0.0);
        CHECK(s.scale(0, 10.0) == 1.0);
        CHECK(s.scale(0, 5.0) == 0.5);
        CHECK(s.scale(0, -4.0) == 0.0);
        CHECK(s.min[1] == s.max[1]);
        CHECK(s.scale(1, 3.0) == 0.5);
        CHECK(s.scale(1, 100.0) == 0.5);

        RawData one = data.subset(std::vector<std::size_t>{0});
        CHECK_THROWS_AS(fit_scaler(one, b), DataError);
        RawData bad = data;
        bad.x(0, 0) = std::nan("");
        CHECK_THROWS_AS(fit_scaler(bad, b), DataError);
    }

    TEST_CASE("centering means equal raw basis column means")
    {
        const auto data = two_way(50, 11, -2.0, 3.0);
        const auto b = build_basis(4, 4, true, true);
        const auto s = fit_scaler(data, b);
        for (std::size_t pos = 0; pos < 6; ++pos) {
            std::vector<double> sums(b.size(), 0.0);
            for (Eigen::Index i = 0; i < 50; ++i) {
                const double x = (data.x(i, static_cast<Eigen::Index>(pos)) - s.min[static_cast<Eigen::Index>(pos)]) /
                                 (s.max[static_cast<Eigen::Index>(pos)] - s.min[static_cast<Eigen::Index>(pos)]);
                const auto v = eval_basis(b, x);
                for (std::size_t h = 0; h < v.size(); ++h) sums[h] += v[h];
            }
            for (std::size_t h = 0; h < b.size(); ++h) {
                CHECK(s.means(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(h)) ==
                      doctest::Approx(sums[h] / 50.0).epsilon(1e-13));
            }
        }
    }

    TEST_CASE("featurize")
    {
        const auto data = two_way(40, 4);
        const auto fd = featurize_training(data, BasisConfig{});
        CHECK(fd.basis_count == 5);
        CHECK(fd.intercept == doctest::Approx(data.y.mean()));
        CHECK(fd.features.cols() == 30);
        for (Eigen::Index c = 0; c < fd.features.cols(); ++c) CHECK(std::abs(fd.features.col(c).mean()) <= 1e-12);
        CHECK((fd.centered_response().array() + fd.intercept - data.y.array()).abs().maxCoeff() < 1e-15);

        // clamping: a test value below the training minimum featurizes like the minimum
        RawData test = data.subset(std::vector<std::size_t>{0, 1});
        const double lo = fd.scaler.min[0];
        test.x(0, 0) = lo - 5.0;
        test.x(1, 0) = lo;
        const auto ft = featurize(test, fd.basis, fd.scaler);
        for (std::size_t h = 0; h < 5; ++h) CHECK(ft.feature(0, 0, h) == ft.feature(1, 0, h));

        // uncentered features at a knot midpoint equal the basis values there
        RawData mid = test;
        const double hi = fd.scaler.max[0];
        mid.x(0, 0) = lo + 0.3 * (hi - lo);
        const auto fu = featurize(mid, fd.basis, fd.scaler, Centering::off);
        const auto v = eval_basis(fd.basis, 0.3);
        for (std::size_t h = 0; h < 5; ++h) CHECK(fu.feature(0, 0, h) == doctest::Approx(v[h]).epsilon(1e-12));

        RawData wrong = data;
        wrong.shape = {2, 2};
        wrong.x.conservativeResize(Eigen::NoChange, 4);
        CHECK_THROWS_AS(featurize(wrong, fd.basis, fd.scaler), DataError);
        const auto again = featurize_training(data, BasisConfig{});
        CHECK(again.features == fd.features);
    }

    TEST_CASE("quantile knots")
    {
        const auto data = two_way(200, 8);
        BasisConfig c;
        c.kind = BasisKind::bspline;
        c.knots = KnotPlacement::quantile;
        const auto fd = featurize_training(data, c);
        const auto& k = fd.basis.internal_knots();
        REQUIRE(k.size() == 4);
        CHECK(std::is_sorted(k.begin(), k.end()));
        CHECK(k.front() > 0.0);
        CHECK(k.back() < 1.0);
    }
}
