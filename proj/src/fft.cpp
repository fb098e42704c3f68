#include "fft.hpp"

#include <fftw3.h>

#include <cstdlib>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace fhelm::detail {

namespace {

// The FFTW planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int threads_from_env() {
  const char* env = std::getenv("FHELM_THREADS");
  if (env == nullptr) return 1;
  int t = std::atoi(env);
  return t > 0 ? t : 1;
}

struct PlanCache {
  std::map<std::tuple<int, int, int, int>, fftw_plan> plans;
  int threads = 0;
  bool threads_ready = false;

  ~PlanCache() {
    for (auto& kv : plans) fftw_destroy_plan(kv.second);
  }

  fftw_plan get(const Grid& g, int sign) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (!threads_ready) {
      fftw_init_threads();
      if (threads == 0) threads = threads_from_env();
      threads_ready = true;
    }
    auto key = std::make_tuple(g.dim(), g.points_per_axis(), sign, threads);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    fftw_plan_with_nthreads(threads);
    std::vector<int> dims(g.dim(), g.points_per_axis());
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * g.size()));
    fftw_plan p = fftw_plan_dft(g.dim(), dims.data(), buf, buf, sign,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(const Grid& g, cplx* data, int sign) {
  fftw_plan p = cache().get(g, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

void set_fft_threads(int threads) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  cache().threads = threads > 0 ? threads : threads_from_env();
}

int fft_threads() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  return cache().threads == 0 ? threads_from_env() : cache().threads;
}

}  // namespace fhelm::detail
