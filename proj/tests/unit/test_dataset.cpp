// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The subgrade authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "subgrade/dataset.hpp"
#include "subgrade/error.hpp"
#include "subgrade/rng.hpp"
#include "support/oracles.hpp"

using namespace subgrade;

namespace {

const char* kHeader = "HARSH,LL,PL,PI,OMC,CA,MDD,CBR,UCS,R\n";

ErrorCode parse_error(const std::string& text) {
    std::istringstream in(text);
    try {
        parse_csv(in);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected a parse error");
    return ErrorCode::InvalidArgument;
}

Dataset small(std::size_t n, std::uint64_t seed = 1) {
    Rng rng(seed, 2);
    return oracle::make_dataset(oracle::random_matrix(rng, n, kNumInputs, 0, 10),
                                oracle::random_matrix(rng, n, kNumTargets, 5, 20));
}

} // namespace

TEST_CASE("canonical schema") {
    const auto& s = FeatureSchema::canonical();
    CHECK(s.input_names == std::vector<std::string>{"HARSH", "LL", "PL", "PI", "OMC", "CA", "MDD"});
    CHECK(s.target_names == std::vector<std::string>{"CBR", "UCS", "R"});
    CHECK_NOTHROW(s.validate());
    CHECK(s.input_index("omc") == 4u);
    CHECK(s.target_index("r") == 2u);
    CHECK(!s.input_index("CBR"));
    FeatureSchema dup = s;
    dup.input_names[1] = "HARSH";
    CHECK_THROWS_AS(dup.validate(), Error);
    CHECK(parse_target("R-value") == Target::R);
    CHECK(parse_target("ucs") == Target::UCS);
    CHECK(!parse_target("mdd"));
}

TEST_CASE("csv load: three rows, any column order and case") {
    std::istringstream in("r,ucs,cbr,mdd,ca,omc,pi,pl,ll,harsh,extra\n"
                          "20,150,10,1.5,1.2,17,30,15,45,0,x\n"
                          "21,160,12,1.6,1.1,17.5,28,14,42,1.5,y\r\n"
                          "22,170,14,1.7,1.0,18,26,13,39,3,z\n");
    const auto d = parse_csv(in);
    REQUIRE(d.size() == 3);
    CHECK(d.row_ids() == std::vector<std::size_t>{0, 1, 2});
    CHECK(d.x()(1, 0) == 1.5);
    CHECK(d.x()(2, 1) == 39.0);
    CHECK(d.y()(0, 0) == 10.0);
    CHECK(d.y()(2, 2) == 22.0);
}

TEST_CASE("csv error paths") {
    CHECK(parse_error("HARSH,LL,PL,PI,OMC,MDD,CBR,UCS,R\n1,2,3,4,5,6,7,8,9\n1,2,3,4,5,6,7,8,9\n") ==
          ErrorCode::MissingColumn);
    CHECK(parse_error(std::string(kHeader) + "1,2,3,4,NaN,6,7,8,9,10\n1,2,3,4,5,6,7,8,9,10\n") ==
          ErrorCode::NonFiniteValue);
    CHECK(parse_error(std::string(kHeader) + "1,2,3,4,inf,6,7,8,9,10\n1,2,3,4,5,6,7,8,9,10\n") ==
          ErrorCode::NonFiniteValue);
    CHECK(parse_error(std::string(kHeader) + "1,2,3,4,abc,6,7,8,9,10\n1,2,3,4,5,6,7,8,9,10\n") ==
          ErrorCode::UnparseableCell);
    CHECK(parse_error(std::string(kHeader) + "1,2,3,4,5,6,7,8,9\n1,2,3,4,5,6,7,8,9,10\n") ==
          ErrorCode::UnparseableCell);
    CHECK(parse_error(std::string(kHeader) + "1,2,3,4,5,6,7,8,9,10\n") == ErrorCode::TooFewRows);

    std::istringstream in(std::string(kHeader) + "1,2,3,4,5,6,7,8,9,10\n1,2,3,4,x,6,7,8,9,10\n");
    try {
        parse_csv(in);
        FAIL("no error");
    } catch (const Error& e) {
        const std::string what = e.what();
        CHECK(what.find("OMC") != std::string::npos);
        CHECK(what.find('2') != std::string::npos);
    }
}

TEST_CASE("csv round trip is exact") {
    const auto d = small(17);
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    const auto back = parse_csv(in);
    CHECK(back.x() == d.x());
    CHECK(back.y() == d.y());
}

TEST_CASE("dataset invariants") {
    CHECK_THROWS_AS(oracle::make_dataset(Matrix(1, kNumInputs), Matrix(1, kNumTargets)), Error);
    Matrix x(3, kNumInputs, 1.0);
    x(1, 2) = std::nan("");
    CHECK_THROWS_AS(oracle::make_dataset(x, Matrix(3, kNumTargets, 1.0)), Error);
    CHECK_THROWS_AS(Dataset(FeatureSchema::canonical(), Matrix(2, kNumInputs), Matrix(2, kNumTargets), {4, 4}),
                    Error);
}

TEST_CASE("quantiles by linear interpolation") {
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(quantile_sorted(v, 0.5) == 2.5);
    CHECK(quantile_sorted(v, 0.25) == 1.75);
    CHECK(quantile_sorted(v, 0.75) == 3.25);
    const std::vector<double> c{5, 5, 5};
    const auto s = column_stats(c);
    CHECK(s.std == 0.0);
    CHECK(s.min == 5.0);
    CHECK(s.max == 5.0);
    CHECK(s.median == 5.0);
}

TEST_CASE("summarize matches a brute-force reference") {
    Rng rng(77, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto d = small(3 + rng.uniform_index(60), 100 + trial);
        const auto s = summarize(d);
        REQUIRE(s.names.size() == kNumInputs + kNumTargets);
        for (std::size_t c = 0; c < s.names.size(); ++c) {
            auto col = c < kNumInputs ? d.x().column(c) : d.y().column(c - kNumInputs);
            std::sort(col.begin(), col.end());
            const double n = static_cast<double>(col.size());
            long double mean = 0;
            for (double v : col) mean += v;
            mean /= n;
            long double ss = 0;
            for (double v : col) ss += (v - mean) * (v - mean);
            auto q = [&](double p) {
                const double h = (n - 1) * p;
                const auto lo = static_cast<std::size_t>(std::floor(h));
                const auto hi = std::min(lo + 1, col.size() - 1);
                return col[lo] + (h - std::floor(h)) * (col[hi] - col[lo]);
            };
            const auto& st = s.columns[c];
            CHECK(st.count == col.size());
            CHECK(oracle::close_rel(st.mean, static_cast<double>(mean), 1e-12));
            CHECK(oracle::close_rel(st.std, static_cast<double>(std::sqrt(ss / (n - 1))), 1e-12));
            CHECK(st.min == col.front());
            CHECK(st.max == col.back());
            CHECK(oracle::close_rel(st.q25, q(0.25), 1e-12));
            CHECK(oracle::close_rel(st.median, q(0.5), 1e-12));
            CHECK(oracle::close_rel(st.q75, q(0.75), 1e-12));
            CHECK(st.min <= st.q25);
            CHECK(st.q25 <= st.median);
            CHECK(st.median <= st.q75);
            CHECK(st.q75 <= st.max);
        }
    }
}

TEST_CASE("split sizes and partition") {
    CHECK(train_size(121, 0.7) == 85);
    CHECK(train_size(10, 0.5) == 5);
    CHECK(train_size(3, 0.5) == 2); // 1.5 rounds half up
    const auto d = small(121);
    const auto [train, test] = split(d, SplitSpec{0.7, 7});
    CHECK(train.size() == 85);
    CHECK(test.size() == 36);
    std::set<std::size_t> ids(train.row_ids().begin(), train.row_ids().end());
    for (auto id : test.row_ids()) CHECK(ids.insert(id).second);
    CHECK(ids.size() == 121);

    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto [a, b] = split(small(10), SplitSpec{0.5, seed});
        CHECK(a.size() == 5);
        CHECK(b.size() == 5);
    }
    const auto again = split(d, SplitSpec{0.7, 7});
    CHECK(again.first == train);
    CHECK(again.second == test);
    const auto other = split(d, SplitSpec{0.7, 8});
    CHECK(other.first.row_ids() != train.row_ids());
}

TEST_CASE("split rejects degenerate partitions") {
    const auto d = small(10);
    for (double f : {0.01, 0.1, 0.9, 0.99}) {
        try {
            split(d, SplitSpec{f, 1});
            FAIL("expected DegenerateSplit");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::DegenerateSplit);
        }
    }
    CHECK_NOTHROW(split(d, SplitSpec{0.2, 1}));
}

TEST_CASE("split disjointness holds for many seeds") {
    const auto d = small(37);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto [tr, te] = split_positions(37, SplitSpec{0.7, seed});
        CHECK(tr.size() + te.size() == 37);
        std::vector<std::size_t> all = tr;
        all.insert(all.end(), te.begin(), te.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
    }
}

TEST_CASE("min-max scaler") {
    Matrix x{{2, 0, 3, 0, 0, 0, 0}, {4, 0, 3, 0, 0, 0, 0}, {6, 0, 3, 0, 0, 0, 0}};
    const auto s = fit_scaler(x);
    CHECK(s.fitted_min()[0] == 2.0);
    CHECK(s.fitted_max()[0] == 6.0);
    CHECK(s.transform_value(0, 4.0) == 0.5);
    CHECK(s.transform_value(0, 2.0) == 0.0);
    CHECK(s.transform_value(0, 6.0) == 1.0);
    CHECK(s.transform_value(0, 8.0) == 1.5); // no clipping
    CHECK(s.fitted_min()[2] == 3.0);
    CHECK(s.fitted_max()[2] == 3.0);
    CHECK(s.transform_value(2, 3.0) == 0.0);
    CHECK(s.transform_value(2, 9.0) == 0.0);
    CHECK(s.constant_features() == std::vector<std::size_t>{1, 2, 3, 4, 5, 6});
    CHECK_THROWS(fit_scaler(Matrix(1, 7)));
}

TEST_CASE("scaler round trip maps training extrema to 0 and 1") {
    const auto d = small(30);
    const auto s = fit_scaler(d);
    const auto t = s.transform(d);
    CHECK(t.y() == d.y()); // targets untouched
    for (std::size_t c = 0; c < kNumInputs; ++c) {
        const auto col = t.x().column(c);
        CHECK(*std::min_element(col.begin(), col.end()) == 0.0);
        CHECK(*std::max_element(col.begin(), col.end()) == 1.0);
    }
}

TEST_CASE("scaler ignores rows outside the training partition") {
    auto d = small(40);
    const auto [tr, te] = split_positions(40, SplitSpec{0.7, 3});
    const auto before = fit_scaler(d.subset(tr));
    Matrix x = d.x();
    for (auto i : te)
        for (std::size_t c = 0; c < kNumInputs; ++c) x(i, c) = 1e6 * (c + 1);
    const auto after = fit_scaler(d.with_inputs(x).subset(tr));
    CHECK(before == after);
}

TEST_CASE("synthesize: determinism, envelopes and monotone targets") {
    const auto a = synthesize(1, 121, 0.0);
    const auto b = synthesize(1, 121, 0.0);
    CHECK(a == b);
    CHECK(synthesize(2, 121, 0.0).x() != a.x());

    const auto d = synthesize(SynthSpec{});
    const auto st = summarize(d);
    CHECK(st.columns[0].min == 0.0);
    CHECK(st.columns[0].max == 12.0);
    CHECK(std::fabs(st.columns[0].mean - 6.0) <= 0.6);
    const auto ranges = reference_ranges();
    for (std::size_t c = 0; c < kNumInputs + kNumTargets; ++c) {
        CHECK(st.columns[c].min >= ranges[c].min);
        CHECK(st.columns[c].max <= ranges[c].max);
    }
    CHECK(ranges[kNumInputs].min == 8.0);
    CHECK(ranges[kNumInputs].max == 44.6);

    // HARSH moves against LL and PI, with MDD
    const auto h = d.x().column(0), ll = d.x().column(1), pi = d.x().column(3), mdd = d.x().column(6);
    auto corr = [](const std::vector<double>& u, const std::vector<double>& v) {
        double mu = 0, mv = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            mu += u[i];
            mv += v[i];
        }
        mu /= u.size();
        mv /= v.size();
        double su = 0, sv = 0, suv = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            su += (u[i] - mu) * (u[i] - mu);
            sv += (v[i] - mv) * (v[i] - mv);
            suv += (u[i] - mu) * (v[i] - mv);
        }
        return suv / std::sqrt(su * sv);
    };
    CHECK(corr(h, ll) < -0.5);
    CHECK(corr(h, pi) < -0.5);
    CHECK(corr(h, mdd) > 0.5);
}

TEST_CASE("synthetic targets are strictly monotone in the documented directions") {
    Rng rng(4, 4);
    const auto ranges = reference_ranges();
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> row(kNumInputs);
        for (std::size_t c = 0; c < kNumInputs; ++c) row[c] = rng.uniform(ranges[c].min, ranges[c].max);
        const auto base = synth_targets(row);
        auto bumped = [&](std::size_t c, double delta) {
            auto r = row;
            r[c] = std::clamp(r[c] + delta, ranges[c].min, ranges[c].max);
            if (r[c] == row[c]) r[c] = row[c] - delta; // at the edge: move the other way
            return std::pair{synth_targets(r), r[c] > row[c]};
        };
        for (std::size_t c : {0u, 6u}) {
            const auto [t, up] = bumped(c, 0.05 * (ranges[c].max - ranges[c].min));
            for (std::size_t k = 0; k < kNumTargets; ++k) CHECK(up == (t[k] > base[k]));
        }
        for (std::size_t c : {1u, 3u}) {
            const auto [t, up] = bumped(c, 0.05 * (ranges[c].max - ranges[c].min));
            for (std::size_t k = 0; k < kNumTargets; ++k) CHECK(up == (t[k] < base[k]));
        }
    }
}

TEST_CASE("synthesize with noise 0: increasing only HARSH raises every target") {
    const auto d = synthesize(1, 121, 0.0);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
        std::vector<double> row(d.x().row(i).begin(), d.x().row(i).end());
        const auto before = synth_targets(row);
        row[0] += 0.5;
        const auto after = synth_targets(row);
        for (std::size_t k = 0; k < kNumTargets; ++k) CHECK(after[k] > before[k]);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto t = synth_targets(d.x().row(i));
        for (std::size_t k = 0; k < kNumTargets; ++k) CHECK(d.y()(i, k) == t[k]);
    }
}
