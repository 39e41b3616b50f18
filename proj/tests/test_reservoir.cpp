#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sesn/common.hpp"
#include "sesn/reservoir.hpp"
#include "sesn/timeseries.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace sesn;

namespace {

struct ThreadGuard {
    ~ThreadGuard() { set_num_threads(0); }
};

ReservoirConfig quantile_config(std::size_t n, std::size_t input_width, std::uint64_t seed = 1)
{
    ReservoirConfig cfg;
    cfg.n_neurons = n;
    cfg.input_width = input_width;
    cfg.seed = seed;
    cfg.threshold.mode = ThresholdConfig::Mode::quantile;
    cfg.camera.reset();
    cfg.washout = 0;
    return cfg;
}

ReservoirConfig camera_config(std::size_t n, std::size_t input_width, std::uint64_t seed = 1)
{
    ReservoirConfig cfg;
    cfg.n_neurons = n;
    cfg.input_width = input_width;
    cfg.seed = seed;
    cfg.camera = CameraModel{.gain = 40.0};  // raw intensities are O(k/M)
    cfg.washout = 0;
    return cfg;
}

std::vector<double> ramp(std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.1 + 0.8 * static_cast<double>(i) / static_cast<double>(n);
    return v;
}

}  // namespace

TEST_CASE("initial state is deterministic and Bernoulli(1/2)")
{
    const ReservoirConfig cfg = quantile_config(10000, 10, 99);
    const ReservoirState a = init_state(cfg);
    const ReservoirState b = init_state(cfg);
    CHECK(a.bits == b.bits);
    CHECK(a.step == 0);

    std::size_t ones = 0;
    for (auto bit : a.bits) ones += bit;
    CHECK(ones > 5000 - 150);  // 3 sigma of Binomial(10^4, 1/2)
    CHECK(ones < 5000 + 150);

    const ReservoirState tiny = init_state(quantile_config(1, 10, 5));
    CHECK(tiny.bits.size() == 1);
    CHECK(init_state(quantile_config(1, 10, 5)).bits == tiny.bits);
}

TEST_CASE("step equals the manual pipeline composition")
{
    const std::size_t n = 64, l = 40;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 11);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};

    for (bool with_camera : {false, true}) {
        const ReservoirConfig cfg = with_camera ? camera_config(n, l, 3) : quantile_config(n, l, 3);
        const ReservoirState state = init_state(cfg);
        const double u = 0.37;

        const ReservoirState next = step(cfg, tm, enc, state, u);
        CHECK(next.step == 1);

        const DmdFrame frame = assemble_frame(encode(enc, u), state.bits);
        SpeckleFrame speckle = compute_speckle(tm, frame);
        if (cfg.camera) speckle = quantize(*cfg.camera, speckle);
        CHECK(next.bits == activate(cfg.threshold, speckle));
    }
}

TEST_CASE("a dark optical path yields an all-zero next state")
{
    const std::size_t n = 32, l = 16;
    TransferMatrix tm = build_transfer_matrix(n, l + n, 2);
    tm.entries.setZero();
    const ReservoirConfig cfg = camera_config(n, l, 7);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    const ReservoirState next = step(cfg, tm, enc, init_state(cfg), 0.9);
    CHECK(next.bits == Bits(n, 0));
}

TEST_CASE("step is deterministic")
{
    const std::size_t n = 48, l = 24;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 13);
    const ReservoirConfig cfg = quantile_config(n, l, 17);
    const ThermometerEncoder enc{.width = l, .lo = -1.0, .hi = 1.0};
    const ReservoirState state = init_state(cfg);
    CHECK(step(cfg, tm, enc, state, 0.2).bits == step(cfg, tm, enc, state, 0.2).bits);
}

TEST_CASE("run discards the washout and shapes the history")
{
    const std::size_t n = 32, l = 16;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 4);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};

    ReservoirConfig cfg = quantile_config(n, l, 5);
    cfg.washout = 3;
    const auto inputs = ramp(10);
    const auto targets = ramp(10);
    const StateHistory hist = run(cfg, tm, enc, inputs, targets);
    CHECK(hist.features.rows() == 7);
    CHECK(hist.features.cols() == n + 1);
    CHECK(hist.targets.size() == 7);
    CHECK(hist.activation_fractions.size() == 10);
    for (std::size_t t = 0; t < 7; ++t) CHECK(hist.targets[static_cast<Eigen::Index>(t)] == targets[t + 3]);

    // features are {-1, +1} with a trailing bias column of exactly 1
    for (Eigen::Index r = 0; r < hist.features.rows(); ++r) {
        CHECK(hist.features(r, hist.features.cols() - 1) == 1.0);
        for (Eigen::Index c = 0; c + 1 < hist.features.cols(); ++c)
            CHECK(std::abs(hist.features(r, c)) == 1.0);
    }

    cfg.washout = 0;
    const StateHistory single = run(cfg, tm, enc, ramp(1), ramp(1));
    CHECK(single.features.rows() == 1);
}

TEST_CASE("Mackey-Glass run at production shape: 1900 x 1025")
{
    const std::size_t n = 1024, l = 100;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 6);
    const MgSeries series = generate_mackey_glass(MgParams{}, 2001);
    const SupervisedSeries sup = make_supervised(series);
    const ThermometerEncoder enc = calibrate(l, sup.inputs);

    ReservoirConfig cfg = quantile_config(n, l, 8);
    cfg.washout = 100;
    const StateHistory hist = run(cfg, tm, enc, sup.inputs, sup.targets);
    CHECK(hist.features.rows() == 1900);
    CHECK(hist.features.cols() == 1025);
}

TEST_CASE("run rejects inconsistent lengths and excessive washout")
{
    const std::size_t n = 16, l = 8;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 4);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    ReservoirConfig cfg = quantile_config(n, l, 5);

    CHECK_THROWS_AS(run(cfg, tm, enc, ramp(10), ramp(9)), std::invalid_argument);
    cfg.washout = 10;
    CHECK_THROWS_AS(run(cfg, tm, enc, ramp(10), ramp(10)), std::invalid_argument);
    cfg.washout = 11;
    CHECK_THROWS_AS(run(cfg, tm, enc, ramp(10), ramp(10)), std::invalid_argument);
}

TEST_CASE("histories are identical under different worker counts")
{
    ThreadGuard guard;
    const std::size_t n = 96, l = 32;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 23);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    ReservoirConfig cfg = quantile_config(n, l, 29);
    cfg.washout = 2;

    set_num_threads(1);
    const StateHistory one = run(cfg, tm, enc, ramp(40), ramp(40));
    set_num_threads(3);
    const StateHistory three = run(cfg, tm, enc, ramp(40), ramp(40));
    set_num_threads(5);
    const StateHistory five = run(cfg, tm, enc, ramp(40), ramp(40));

    CHECK(one.features == three.features);
    CHECK(one.features == five.features);
    CHECK(one.targets == three.targets);
}

TEST_CASE("quantile dynamics are invariant to the matrix scale")
{
    const std::size_t n = 128, l = 64;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 31);
    TransferMatrix scaled;
    scaled.seed = tm.seed;
    scaled.entries = tm.entries * 1000.0;

    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    const ReservoirConfig cfg = quantile_config(n, l, 37);
    const auto inputs = ramp(100);

    const StateHistory a = run(cfg, tm, enc, inputs, inputs);
    const StateHistory b = run(cfg, scaled, enc, inputs, inputs);
    CHECK(a.features == b.features);
}

TEST_CASE("input and state drive disjoint column blocks of the transfer matrix")
{
    const std::size_t n = 32, l = 40;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 41);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    const ReservoirConfig cfg = quantile_config(n, l, 43);
    const ReservoirState state = init_state(cfg);

    // Explicit V i + W x with V, W the input/state column blocks of H,
    // accumulated in the same ascending-column order as the optics.
    const auto explicit_blocks = [&](const Bits& encoded, const Bits& state_bits) {
        Eigen::VectorXcd field = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < l; ++j)
            if (encoded[j]) field += tm.entries.col(static_cast<Eigen::Index>(j));
        for (std::size_t j = 0; j < n; ++j)
            if (state_bits[j]) field += tm.entries.col(static_cast<Eigen::Index>(l + j));
        SpeckleFrame speckle;
        speckle.intensities = field.cwiseAbs2();
        return activate(cfg.threshold, speckle);
    };

    std::mt19937 rng(55);
    std::uniform_real_distribution<double> dist(0.0, 1.0);

    // frozen state, varying input: only the V block responds
    for (int trial = 0; trial < 10; ++trial) {
        const double u = dist(rng);
        CHECK(step(cfg, tm, enc, state, u).bits == explicit_blocks(encode(enc, u), state.bits));
    }

    // frozen input, varying state: only the W block responds
    const double u = 0.42;
    ReservoirState wandering = state;
    for (int trial = 0; trial < 10; ++trial) {
        for (auto& bit : wandering.bits) bit = static_cast<std::uint8_t>(rng() & 1u);
        CHECK(step(cfg, tm, enc, wandering, u).bits == explicit_blocks(encode(enc, u), wandering.bits));
    }
}

TEST_CASE("one parallel instance reproduces run exactly")
{
    const std::size_t n = 64, l = 32;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 47);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    ReservoirConfig cfg = quantile_config(n, l, 53);
    cfg.washout = 4;

    const StateHistory direct = run(cfg, tm, enc, ramp(30), ramp(30));
    const StateHistory parallel = run_parallel(cfg, tm, enc, ramp(30), ramp(30), 1);
    CHECK(direct.features == parallel.features);
    CHECK(direct.targets == parallel.targets);
    CHECK(direct.activation_fractions == parallel.activation_fractions);
}

TEST_CASE("parallel history width counts instances")
{
    const std::size_t n = 100, l = 20;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 59);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    const ReservoirConfig cfg = quantile_config(n, l, 61);
    const StateHistory hist = run_parallel(cfg, tm, enc, ramp(12), ramp(12), 3);
    CHECK(hist.features.cols() == 301);
    CHECK(hist.n_instances == 3);
}

TEST_CASE("two parallel instances equal two concatenated independent runs")
{
    const std::size_t n = 48, l = 24;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 67);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    ReservoirConfig cfg = quantile_config(n, l, 71);
    cfg.washout = 3;
    cfg.batch_size = 1;  // exercise chunked batching too

    const StateHistory both = run_parallel(cfg, tm, enc, ramp(25), ramp(25), 2);

    ReservoirConfig first = cfg;
    first.seed = instance_seed(cfg.seed, 0);
    ReservoirConfig second = cfg;
    second.seed = instance_seed(cfg.seed, 1);
    const StateHistory a = run(first, tm, enc, ramp(25), ramp(25));
    const StateHistory b = run(second, tm, enc, ramp(25), ramp(25));

    REQUIRE(both.features.rows() == a.features.rows());
    const auto nn = static_cast<Eigen::Index>(n);
    CHECK(both.features.leftCols(nn) == a.features.leftCols(nn));
    CHECK(both.features.middleCols(nn, nn) == b.features.leftCols(nn));
    CHECK(both.features.col(2 * nn) == Eigen::VectorXd::Ones(both.features.rows()));
    CHECK(both.targets == a.targets);
}

TEST_CASE("parallel history respects the memory budget")
{
    const std::size_t n = 64, l = 16;
    const TransferMatrix tm = build_transfer_matrix(n, l + n, 73);
    const ThermometerEncoder enc{.width = l, .lo = 0.0, .hi = 1.0};
    const ReservoirConfig cfg = quantile_config(n, l, 79);

    const std::size_t previous = memory_budget_bytes();
    set_memory_budget_bytes(1 << 10);
    CHECK_THROWS_AS(run_parallel(cfg, tm, enc, ramp(50), ramp(50), 4), std::invalid_argument);
    set_memory_budget_bytes(previous);
}

TEST_CASE("fixed_dn without a camera is rejected by validation")
{
    ReservoirConfig cfg;
    cfg.camera.reset();  // defaults keep fixed_dn mode
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
