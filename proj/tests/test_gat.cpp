#include <doctest.h>

#include <cmath>

#include "gkd/gat.hpp"
#include "test_util.hpp"

using namespace gkd;

namespace {

std::vector<GatParams> random_stack(std::size_t d_in, std::size_t d_out,
                                    std::size_t layers, Rng& rng) {
  std::vector<GatParams> out;
  std::size_t in = d_in;
  for (std::size_t l = 0; l < layers; ++l) {
    out.push_back(init_gat_params(in, d_out, rng));
    in = d_out;
  }
  return out;
}

Array run_stack(const Array& h, const std::vector<GatParams>& layers,
                const GraphMask& mask) {
  Tape t;
  auto out = gat_stack(t, t.input(h), layers, mask);
  return t.value(out);
}

}  // namespace

TEST_CASE("zero attention vector gives uniform attention") {
  Rng rng(1);
  std::size_t n = 4, d = 3;
  Array h = testutil::random_array({n, d}, rng);
  GatParams p = init_gat_params(d, d, rng);
  p.attn = Array::zeros({2 * d});
  GraphMask mask(n, true);
  Tape t;
  auto w = t.input(p.weight);
  auto a = t.input(p.attn);
  auto scores = pairwise_scores(t, t.input(h), w, a, 0.2, mask);
  for (double v : t.value(scores).data) CHECK(v == 0.0);

  auto alpha = t.masked_softmax(scores, mask);
  for (double v : t.value(alpha).data) {
    CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("identical node features give identical live scores") {
  Rng rng(2);
  std::size_t n = 5, d = 4;
  Array h = Array::zeros({n, d});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) h.data[i * d + j] = 0.3 * (j + 1);
  GatParams p = init_gat_params(d, d, rng);
  GraphMask mask(n, true);
  Tape t;
  auto scores = pairwise_scores(t, t.input(h), t.input(p.weight),
                                t.input(p.attn), p.leaky_slope, mask);
  double first = t.value(scores).data[0];
  for (double v : t.value(scores).data) CHECK(v == doctest::Approx(first));
}

TEST_CASE("hand-evaluated 2-node score") {
  // W=[[1]], a=[1,1], slope=0.2, h=[1,2]: score[0][1] = LeakyReLU(1+2) = 3
  Tape t;
  auto h = t.input(Array::matrix(2, 1, {1, 2}));
  auto w = t.input(Array::matrix(1, 1, {1}));
  auto a = t.input(Array::vector({1, 1}));
  auto scores = pairwise_scores(t, h, w, a, 0.2, GraphMask(2, true));
  CHECK(t.value(scores).data[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("single node layer returns W h") {
  Rng rng(3);
  Array h = testutil::random_array({1, 3}, rng);
  GatParams p = init_gat_params(3, 2, rng);
  Tape t;
  auto out = gat_layer(t, t.input(h), t.input(p.weight), t.input(p.attn),
                       p.leaky_slope, GraphMask(1, true));
  for (std::size_t j = 0; j < 2; ++j) {
    double wh = 0.0;
    for (std::size_t i = 0; i < 3; ++i) wh += p.weight.data[j * 3 + i] * h.data[i];
    CHECK(t.value(out).data[j] == doctest::Approx(wh).epsilon(1e-12));
  }
}

TEST_CASE("two identical nodes pool to W h with alpha = 0.5") {
  Rng rng(4);
  Array row = testutil::random_array({1, 3}, rng);
  Array h = Array::zeros({2, 3});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) h.data[i * 3 + j] = row.data[j];
  GatParams p = init_gat_params(3, 3, rng);
  Tape t;
  auto out = gat_layer(t, t.input(h), t.input(p.weight), t.input(p.attn),
                       p.leaky_slope, GraphMask(2, true));
  Tape t2;
  auto single = gat_layer(t2, t2.input(row), t2.input(p.weight),
                          t2.input(p.attn), p.leaky_slope, GraphMask(1, true));
  for (int j = 0; j < 3; ++j) {
    CHECK(t.value(out).data[j] ==
          doctest::Approx(t2.value(single).data[j]).epsilon(1e-12));
    CHECK(t.value(out).data[3 + j] ==
          doctest::Approx(t2.value(single).data[j]).epsilon(1e-12));
  }
}

TEST_CASE("permutation equivariance") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 3 + rng.next_below(5);
    std::size_t d = 2 + rng.next_below(3);
    Array h = testutil::random_array({n, d}, rng);
    GatParams p = init_gat_params(d, d, rng);
    GraphMask mask(n, false);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.next_below(2)) {
          mask.set(i, j, true);
          mask.set(j, i, true);
        }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);

    Array hp = Array::zeros({n, d});
    GraphMask mp(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        hp.data[i * d + j] = h.data[perm[i] * d + j];
      for (std::size_t j = 0; j < n; ++j)
        mp.set(i, j, mask.get(perm[i], perm[j]));
    }

    Array out = run_stack(h, {p}, mask);
    Array out_p = run_stack(hp, {p}, mp);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        CHECK(std::abs(out_p.data[i * d + j] - out.data[perm[i] * d + j]) < 1e-9);
      }
    }
  }
}

TEST_CASE("masking soundness: unmasked nodes never leak in") {
  Rng rng(7);
  std::size_t n = 6, d = 3;
  Array h = testutil::random_array({n, d}, rng);
  // two isolated cliques {0,1,2} and {3,4,5}
  GraphMask mask(n, false);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      mask.set(i, j, true);
      mask.set(3 + i, 3 + j, true);
    }
  GatParams p = init_gat_params(d, d, rng);
  Array out1 = run_stack(h, {p}, mask);
  Array h2 = h;
  h2.data[5 * d + 1] += 10.0;  // perturb a node of the second clique
  Array out2 = run_stack(h2, {p}, mask);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      CHECK(out1.data[i * d + j] == out2.data[i * d + j]);
    }
  }
}

TEST_CASE("gat_stack composition") {
  Rng rng(8);
  std::size_t n = 4, d = 3;
  Array h = testutil::random_array({n, d}, rng);
  GraphMask mask(n, true);

  // L=0 is the identity
  CHECK(run_stack(h, {}, mask) == h);

  // L=1 equals one layer (no trailing nonlinearity)
  std::vector<GatParams> one = random_stack(d, d, 1, rng);
  Tape t;
  auto direct = gat_layer(t, t.input(h), t.input(one[0].weight),
                          t.input(one[0].attn), one[0].leaky_slope, mask);
  CHECK(run_stack(h, one, mask) == t.value(direct));

  // L=3 with square layers preserves N x d
  std::vector<GatParams> three = random_stack(d, d, 3, rng);
  Array out = run_stack(h, three, mask);
  CHECK(out.shape == std::vector<std::size_t>{n, d});

  // dimension chain break
  std::vector<GatParams> broken = {init_gat_params(d, d + 1, rng),
                                   init_gat_params(d, d, rng)};
  Tape t2;
  CHECK_THROWS_AS(gat_stack(t2, t2.input(h), broken, mask), ShapeError);
}

TEST_CASE("stack gradients pass grad_check") {
  Rng rng(9);
  std::size_t n = 5, d = 3;
  Array h = testutil::random_array({n, d}, rng);
  GraphMask mask(n, true);
  std::vector<GatParams> layers = random_stack(d, d, 2, rng);
  double err = grad_check(
      [&](Tape& t, const std::vector<Tape::VarId>& p) {
        std::vector<GatParams> ls = layers;
        ls[0].weight = t.value(p[0]);
        ls[0].attn = t.value(p[1]);
        ls[1].weight = t.value(p[2]);
        ls[1].attn = t.value(p[3]);
        // rebuild the stack with the perturbed parameters wired through
        Tape::VarId cur = t.input(h);
        cur = gat_layer(t, cur, p[0], p[1], ls[0].leaky_slope, mask);
        cur = t.leaky_relu(cur, kInterLayerSlope);
        cur = gat_layer(t, cur, p[2], p[3], ls[1].leaky_slope, mask);
        return t.sum(cur);
      },
      {layers[0].weight, layers[0].attn, layers[1].weight, layers[1].attn},
      1e-5);
  CHECK(err < 1e-4);
}
