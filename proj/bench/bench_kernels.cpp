// Times the serial and OpenMP batch loss kernels on the same batch and checks
// that they produce identical gradients.
//
// usage: bench_kernels [repetitions] [batch_size]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>

#include <omp.h>

#include "muzero/batch_loss.hpp"
#include "muzero/envs.hpp"
#include "muzero/trainer.hpp"

using namespace muzero;

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    const std::size_t batch = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 128;

    const Network network(ModelConfig{4, 2, 8, {64, 64}});
    const auto params = network.init_params(7);
    envs::CartPole env;
    std::mt19937_64 rng(11);
    ReplayBuffer buffer(ReplayConfig{500, 0.5, 50, 0.997, 2}, 3);
    for (int i = 0; i < 40; ++i) buffer.store_game(random_episode(env, rng));
    const auto sample = buffer.sample_batch(batch, 10);

    LossWeights weights;
    weights.reconstruction = 1.0;
    weights.consistency = 1.0;
    std::vector<double> g_serial(network.param_count()), g_parallel(network.param_count());
    LossWorkspace ws;

    auto time = [&](auto&& kernel, std::vector<double>& grad) {
        kernel(network, params.values(), sample.targets, weights, LossOptions{}, grad, ws);
        const auto start = std::chrono::steady_clock::now();
        for (int r = 0; r < reps; ++r)
            kernel(network, params.values(), sample.targets, weights, LossOptions{}, grad, ws);
        const std::chrono::duration<double, std::milli> d = std::chrono::steady_clock::now() - start;
        return d.count() / reps;
    };
    const double serial_ms = time(batch_loss_serial, g_serial);
    const double parallel_ms = time(batch_loss_parallel, g_parallel);
    const bool same = std::memcmp(g_serial.data(), g_parallel.data(), g_serial.size() * sizeof(double)) == 0;

    std::printf("params %zu  batch %zu  unroll 10  threads %d\n", network.param_count(), batch,
                omp_get_max_threads());
    std::printf("serial    %8.3f ms/batch\n", serial_ms);
    std::printf("parallel  %8.3f ms/batch  speedup %.2fx\n", parallel_ms, serial_ms / parallel_ms);
    std::printf("gradients %s\n", same ? "identical" : "DIFFER");
    return same ? 0 : 1;
}
