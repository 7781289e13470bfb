#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "biso/io.hpp"
#include "biso/model.hpp"
#include "testutil.hpp"

using namespace biso;

TEST_CASE("oracle level set boundaries") {
  BisoInstance inst;
  inst.m = Matrix(1, 3);
  inst.m(0, 0) = 0.7;  // = p+h
  inst.m(0, 1) = 0.5;  // = p
  inst.m(0, 2) = 0.3;  // = p-h
  inst.row_perm = Permutation::identity(1);
  inst.col_perm = Permutation::identity(3);
  const ClassificationMatrix r = oracle_level_set(inst, 0.5, 0.2);
  CHECK(r.at(0, 0) == Cell::kOne);   // boundary inclusive
  CHECK(r.at(0, 1) == Cell::kNA);
  CHECK(r.at(0, 2) == Cell::kZero);
}

TEST_CASE("two value matrices have no tolerance band") {
  const Permutation id2 = Permutation::identity(2);
  const BisoInstance inst = gen_two_value(2, 2, 0.5, 0.2, id2, id2, {1, 1});
  const ClassificationMatrix r = oracle_level_set(inst, 0.5, 0.2);
  for (const Cell c : r.cells) CHECK(c != Cell::kNA);
}

TEST_CASE("gen_two_value constant cuts") {
  const Permutation id = Permutation::identity(4);
  const BisoInstance hi = gen_two_value(4, 4, 0.5, 0.2, id, id, {4, 4, 4, 4});
  const BisoInstance lo = gen_two_value(4, 4, 0.5, 0.2, id, id, {0, 0, 0, 0});
  for (double v : hi.m.data) CHECK(v == doctest::Approx(0.7));
  for (double v : lo.m.data) CHECK(v == doctest::Approx(0.3));
}

TEST_CASE("gen_two_value staircase pattern and monotonicity") {
  const Permutation id = Permutation::identity(4);
  const BisoInstance inst = gen_two_value(4, 4, 0.5, 0.2, id, id, {4, 3, 2, 1});
  // upper-left triangular high block
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(inst.m(i, j) == doctest::Approx(i < 4 - j ? 0.7 : 0.3));
  CHECK(is_bi_isotonic(inst));
}

TEST_CASE("gen_two_value rejects non-monotone cuts") {
  const Permutation id = Permutation::identity(3);
  CHECK_THROWS_AS(gen_two_value(3, 3, 0.5, 0.2, id, id, {1, 2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_two_value(3, 3, 0.5, 0.2, id, id, {4, 2, 0}), std::invalid_argument);
}

TEST_CASE("noisy sorting strict law") {
  RngStream rng(7);
  const BisoInstance inst = gen_noisy_sorting(3, 0.2, false, rng);
  const Permutation& pi = inst.row_perm;
  // in pi-sorted order the matrix is the canonical triangular pattern
  const Permutation inv = pi.inverse();
  Matrix sorted(3, 3);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) sorted(x, y) = inst.m(inv(x), inv(y));
  const double want[3][3] = {{.5, .7, .7}, {.3, .5, .7}, {.3, .3, .5}};
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) CHECK(sorted(x, y) == doctest::Approx(want[x][y]));
}

TEST_CASE("noisy sorting strict takes exactly three values") {
  RngStream rng(11);
  const BisoInstance inst = gen_noisy_sorting(8, 0.1, false, rng);
  std::set<double> values(inst.m.data.begin(), inst.m.data.end());
  CHECK(values.size() == 3);
  CHECK(is_skew_symmetric(inst.m));
  CHECK(is_bi_isotonic(inst));
}

TEST_CASE("noisy sorting generalized invariants") {
  RngStream rng(13);
  const BisoInstance inst = gen_noisy_sorting(12, 0.15, true, rng);
  CHECK(is_skew_symmetric(inst.m));
  CHECK(is_bi_isotonic(inst));
  for (int i = 0; i < 12; ++i) CHECK(inst.m(i, i) == doctest::Approx(0.5));
  const Permutation& pi = inst.row_perm;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      if (pi(i) < pi(j)) CHECK(inst.m(i, j) >= 0.5 + 0.15);
      if (pi(i) > pi(j)) CHECK(inst.m(i, j) <= 0.5 - 0.15);
    }
  CHECK_THROWS_AS(gen_noisy_sorting(4, 0.5, false, rng), std::invalid_argument);
}

TEST_CASE("gen_packing block pattern") {
  const BisoInstance a = gen_packing(4, 3, 0.5, 0.2, 2, {1, 0, 1, 0});
  for (int j = 0; j < 3; ++j) {
    CHECK(a.m(0, j) == doctest::Approx(j < 2 ? 0.7 : 0.3));
    CHECK(a.m(2, j) == doctest::Approx(j < 2 ? 0.7 : 0.3));
    CHECK(a.m(1, j) == doctest::Approx(0.3));
    CHECK(a.m(3, j) == doctest::Approx(0.3));
  }
  CHECK(is_bi_isotonic(a));
  // all-first-half flags, l = d: two-value block matrix
  const BisoInstance b = gen_packing(4, 3, 0.5, 0.2, 3, {1, 1, 0, 0});
  for (int j = 0; j < 3; ++j) {
    CHECK(b.m(0, j) == doctest::Approx(0.7));
    CHECK(b.m(3, j) == doctest::Approx(0.3));
  }
  CHECK_THROWS_AS(gen_packing(4, 3, 0.5, 0.2, 2, {1, 1, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(gen_packing(5, 3, 0.5, 0.2, 2, {1, 0, 1, 0, 0}), std::invalid_argument);
}

TEST_CASE("packing column count") {
  // 0.16 * 1 / (1 * 0.04) = 4
  CHECK(packing_column_count(1.0, 1.0, 0.2, 100) == 4);
  CHECK(packing_column_count(1.0, 1.0, 0.2, 3) == 3);
  CHECK(packing_column_count(0.1, 4.0, 0.4, 100) == 1);
}

TEST_CASE("gen_multi_level with two values matches the two-value law") {
  RngStream rng(3);
  const BisoInstance inst = gen_multi_level(6, 5, {0.3, 0.7}, rng);
  for (double v : inst.m.data) CHECK((v == doctest::Approx(0.3) || v == doctest::Approx(0.7)));
  CHECK(is_bi_isotonic(inst));
}

TEST_CASE("gen_multi_level nested boundaries") {
  RngStream rng(5);
  const std::vector<double> values{0.1, 0.3, 0.55, 0.8};
  const BisoInstance inst = gen_multi_level(9, 7, values, rng);
  CHECK(is_bi_isotonic(inst));
  // every entry is one of the levels
  for (double v : inst.m.data) {
    bool found = false;
    for (double lvl : values) found = found || v == doctest::Approx(lvl);
    CHECK(found);
  }
  CHECK_THROWS_AS(gen_multi_level(4, 4, {0.5, 0.5}, rng), std::invalid_argument);
  CHECK_THROWS_AS(gen_multi_level(4, 4, {0.9}, rng), std::invalid_argument);
}

TEST_CASE("gen_multi_level with nd distinct values") {
  RngStream rng(9);
  std::vector<double> values(12);
  for (int k = 0; k < 12; ++k) values[k] = (k + 1) / 13.0;
  const BisoInstance inst = gen_multi_level(3, 4, values, rng);
  CHECK(is_bi_isotonic(inst));
}

TEST_CASE("all generators stay bi-isotonic across seeds") {
  RngStream root(20240501);
  for (int seed = 0; seed < 1000; ++seed) {
    RngStream rng = root.child(seed);
    const int n = 2 + static_cast<int>(rng.next_below(31));
    const int d = 2 + static_cast<int>(rng.next_below(31));

    RngStream r1 = rng.child(1);
    const int groups = 2 + static_cast<int>(r1.next_below(std::min(n, d + 1) - 1));
    const Permutation rp = Permutation::random(n, r1);
    const Permutation cp = Permutation::random(d, r1);
    CHECK(is_bi_isotonic(gen_two_value(n, d, 0.5, 0.25, rp, cp, staircase_random(n, d, r1))));
    CHECK(is_bi_isotonic(gen_two_value(n, d, 0.4, 0.1, rp, cp, staircase_diagonal(n, d))));
    CHECK(is_bi_isotonic(gen_two_value(n, d, 0.6, 0.2, rp, cp, staircase_groups(n, d, groups))));

    RngStream r2 = rng.child(2);
    CHECK(is_bi_isotonic(gen_noisy_sorting(n, 0.1 + 0.3 * r2.next_unit(), seed % 2 == 0, r2)));

    RngStream r3 = rng.child(3);
    const int even_n = n - n % 2;
    std::vector<int> v(even_n, 0);
    std::fill(v.begin(), v.begin() + even_n / 2, 1);
    for (int i = even_n - 1; i > 0; --i) std::swap(v[i], v[r3.next_below(i + 1)]);
    CHECK(is_bi_isotonic(gen_packing(even_n, d, 0.5, 0.2, 1 + r3.next_below(d), v)));

    RngStream r4 = rng.child(4);
    CHECK(is_bi_isotonic(gen_multi_level(n, d, {0.15, 0.4, 0.75}, r4)));

    RngStream r5 = rng.child(5);
    CHECK(is_bi_isotonic(gen_random_biso(n, d, r5)));
  }
}

TEST_CASE("two-value oracle level set has no NA") {
  RngStream rng(77);
  for (int seed = 0; seed < 50; ++seed) {
    RngStream r = rng.child(seed);
    const Permutation rp = Permutation::random(8, r);
    const Permutation cp = Permutation::random(6, r);
    const BisoInstance inst = gen_two_value(8, 6, 0.5, 0.15, rp, cp, staircase_random(8, 6, r));
    const ClassificationMatrix lvl = oracle_level_set(inst, 0.5, 0.15);
    for (const Cell c : lvl.cells) CHECK(c != Cell::kNA);
  }
}

TEST_CASE("noisy sorting skew symmetry across seeds") {
  RngStream rng(123);
  for (int seed = 0; seed < 50; ++seed) {
    RngStream r = rng.child(seed);
    CHECK(is_skew_symmetric(gen_noisy_sorting(10, 0.2, seed % 2 == 0, r).m));
  }
}

TEST_CASE("instance file round trip") {
  RngStream rng(31);
  const BisoInstance inst = gen_random_biso(5, 7, rng);
  std::stringstream ss;
  write_instance(inst, ss);
  const BisoInstance back = read_instance(ss);
  CHECK(back.m == inst.m);
  CHECK(back.row_perm == inst.row_perm);
  CHECK(back.col_perm == inst.col_perm);
  CHECK(back.model == inst.model);
}

TEST_CASE("classification grid round trip") {
  RngStream rng(33);
  const BisoInstance inst = gen_random_biso(4, 6, rng);
  const ClassificationMatrix r = oracle_level_set(inst, 0.5, 0.1);
  std::stringstream ss;
  write_classification(r, ss);
  const ClassificationMatrix back = read_classification(ss, 0.5, 0.1);
  CHECK(back.cells == r.cells);
}

TEST_CASE("permutation basics") {
  RngStream rng(1);
  const Permutation p = Permutation::random(10, rng);
  CHECK(p.is_valid());
  const Permutation inv = p.inverse();
  for (int i = 0; i < 10; ++i) CHECK(inv(p(i)) == i);
  CHECK_THROWS_AS(Permutation::from_mapping({0, 0, 1}), std::invalid_argument);
  const Permutation r = p.reversed();
  for (int i = 0; i < 10; ++i) CHECK(r(i) == 9 - p(i));
}
