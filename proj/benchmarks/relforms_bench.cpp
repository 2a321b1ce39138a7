#include <random>

#include <benchmark/benchmark.h>

#include "relforms/fem2d.hpp"
#include "relforms/relation.hpp"

namespace relforms {
namespace {

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return a;
}

void BM_SvdRank(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Index n = state.range(0);
  const Matrix a = random_matrix(rng, n, n / 2) * random_matrix(rng, n / 2, n);
  for (auto _ : state) benchmark::DoNotOptimize(svd_rank(a, kDefaultTol).rank);
}
BENCHMARK(BM_SvdRank)->Arg(16)->Arg(64)->Arg(256);

void BM_FromForm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Index n = state.range(0);
  const Matrix b = random_matrix(rng, n, n);
  const FormTriple f(0.5 * (b + b.adjoint()), random_matrix(rng, n / 2, n));
  for (auto _ : state) benchmark::DoNotOptimize(from_form(f).dim());
}
BENCHMARK(BM_FromForm)->Arg(16)->Arg(64)->Arg(128);

void BM_Assemble(benchmark::State& state) {
  const fem::Mesh mesh = fem::mesh_unit_square(state.range(0));
  const auto coeff = fem::CoefficientField::identity(mesh.num_triangles(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fem::assemble(mesh, coeff).g.sum());
  state.SetItemsProcessed(state.iterations() * mesh.num_triangles());
}
BENCHMARK(BM_Assemble)->Arg(8)->Arg(16)->Arg(32);

void BM_DtnGraph(benchmark::State& state) {
  const fem::Mesh mesh = fem::mesh_unit_square(state.range(0));
  const auto sys = fem::assemble(mesh, fem::CoefficientField::identity(mesh.num_triangles()));
  for (auto _ : state) benchmark::DoNotOptimize(fem::dtn_graph(sys).dim());
}
BENCHMARK(BM_DtnGraph)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace relforms

BENCHMARK_MAIN();
