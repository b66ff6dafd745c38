// Times the batch kernels (ensemble prediction, criterion ranking, sampler
// objective evaluation) in serial vs OpenMP mode and checks the two modes
// agree bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "hm/criteria.hpp"
#include "hm/design.hpp"
#include "hm/ensemble.hpp"
#include "hm/implausibility.hpp"
#include "hm/parallel.hpp"
#include "hm/scoring.hpp"
#include "hm/training.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

}  // namespace

int main() {
    const int d = 3, n_train = 60, n_eval = 4000, repeats = 3;
    hm::TrainingSet ts;
    ts.inputs = hm::latin_hypercube(n_train, d, 7);
    ts.outputs.resize(n_train);
    for (int i = 0; i < n_train; ++i)
        ts.outputs[i] = std::sin(5.0 * ts.inputs(i, 0)) + ts.inputs(i, 1) * ts.inputs(i, 2);

    hm::HyperPrior prior;
    const hm::PosteriorEnsemble ensemble =
        hm::sample_hyperposterior(ts, prior, 20, 42, {});
    const Eigen::MatrixXd eval = hm::latin_hypercube(n_eval, d, 11);
    const hm::UncertaintyBudget budget{0.0, 1e-4, 3.0};
    const hm::TargetDatum target{0.5, "y"};

    auto predict_pass = [&](hm::ExecMode mode, std::vector<hm::PredictiveMixture>& out) {
        out.resize(n_eval);
        hm::for_each_index(n_eval, mode, [&](std::size_t i) {
            out[i] = hm::predict(ensemble, eval.row(static_cast<Eigen::Index>(i)).transpose());
        });
    };
    auto score_pass = [&](hm::ExecMode mode, const std::vector<hm::PredictiveMixture>& mixes,
                          std::vector<double>& out) {
        out.resize(n_eval);
        hm::for_each_index(n_eval, mode, [&](std::size_t i) {
            const hm::Moments mom = hm::mixture_moments(mixes[i]);
            out[i] = hm::entropic_profile(
                         {mom.mean, std::sqrt(mom.variance), budget, target.z})
                         .value;
        });
    };
    auto objective_pass = [&](hm::ExecMode mode, std::vector<double>& out) {
        out.resize(n_eval);
        hm::for_each_index(n_eval, mode, [&](std::size_t i) {
            out[i] = hm::prob_nonimplausible(
                hm::predict(ensemble, eval.row(static_cast<Eigen::Index>(i)).transpose()),
                budget, target);
        });
    };

    std::vector<hm::PredictiveMixture> mix_s, mix_p;
    std::vector<double> score_s, score_p, obj_s, obj_p;

    const double t_pred_s =
        time_ms([&] { predict_pass(hm::ExecMode::serial, mix_s); }, repeats);
    const double t_pred_p =
        time_ms([&] { predict_pass(hm::ExecMode::openmp, mix_p); }, repeats);
    const double t_rank_s =
        time_ms([&] { score_pass(hm::ExecMode::serial, mix_s, score_s); }, repeats);
    const double t_rank_p =
        time_ms([&] { score_pass(hm::ExecMode::openmp, mix_p, score_p); }, repeats);
    const double t_obj_s =
        time_ms([&] { objective_pass(hm::ExecMode::serial, obj_s); }, repeats);
    const double t_obj_p =
        time_ms([&] { objective_pass(hm::ExecMode::openmp, obj_p); }, repeats);

    bool identical = true;
    for (int i = 0; i < n_eval; ++i) {
        if (score_s[i] != score_p[i] || obj_s[i] != obj_p[i]) identical = false;
        for (std::size_t c = 0; c < mix_s[static_cast<std::size_t>(i)].components.size(); ++c) {
            const auto& a = mix_s[static_cast<std::size_t>(i)].components[c];
            const auto& b = mix_p[static_cast<std::size_t>(i)].components[c];
            if (a.mean != b.mean || a.variance != b.variance) identical = false;
        }
    }

    std::printf("kernel            serial-ms  openmp-ms  speedup\n");
    std::printf("prediction sweep  %9.2f  %9.2f  %6.2fx\n", t_pred_s, t_pred_p,
                t_pred_s / t_pred_p);
    std::printf("criterion rank    %9.2f  %9.2f  %6.2fx\n", t_rank_s, t_rank_p,
                t_rank_s / t_rank_p);
    std::printf("sampler objective %9.2f  %9.2f  %6.2fx\n", t_obj_s, t_obj_p,
                t_obj_s / t_obj_p);
    std::printf("serial/openmp outputs bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
