#include <doctest.h>

#include "fockflow/config.hpp"
#include "fockflow/error.hpp"

using namespace fockflow;

TEST_CASE("complex literals") {
  CHECK(parse_complex("1.5") == Complex(1.5, 0.0));
  CHECK(parse_complex("0.3i") == Complex(0.0, 0.3));
  CHECK(parse_complex("-0.3i") == Complex(0.0, -0.3));
  CHECK(parse_complex("0.9+0.1i") == Complex(0.9, 0.1));
  CHECK(parse_complex("-0.2-0.5i") == Complex(-0.2, -0.5));
  CHECK(parse_complex("1e-2-2e-3i") == Complex(1e-2, -2e-3));
  CHECK(parse_complex("1+i") == Complex(1.0, 1.0));
  CHECK(parse_complex(" 2 ") == Complex(2.0, 0.0));
  CHECK_THROWS_AS(parse_complex("abc"), InputError);
  CHECK_THROWS_AS(parse_complex(""), InputError);
  CHECK(parse_complex_list("1, 0.5i").size() == 2);
}

TEST_CASE("config text round-trips") {
  RunConfig c;
  c.polynomial = "x^2 + y^2 - 25";
  c.cutoff = 12;
  c.alphas = {{0.9, 0.1}, {1.0 / 3.0, -0.2}};
  c.schedule = "linear";
  c.levels = 5;
  c.end_s = 0.9995;
  c.closure = "tracked";
  c.grid = {0.1, 0.25, 1.0 / 7.0};
  c.times = {10, 50, 200};
  c.directory = "out dir";
  c.seed = 42;
  const RunConfig back = parse_config(to_text(c));
  CHECK(back == c);
  CHECK(to_text(back) == to_text(c));
}

TEST_CASE("config parsing errors") {
  CHECK_THROWS_AS(parse_config("[problem]\nfoo = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config("cutoff = 3\n"), InputError);
  CHECK_THROWS_AS(parse_config("[problem\ncutoff = 3\n"), InputError);
  CHECK_THROWS_AS(parse_config("[problem]\ncutoff = -3\n"), InputError);
  CHECK_THROWS_AS(parse_config("[problem]\ncutoff\n"), InputError);
  const auto c = parse_config("# comment\n\n[problem]\ncutoff = 3\n; another\n");
  CHECK(c.cutoff == 3);
}

TEST_CASE("resolved settings") {
  RunConfig c;
  CHECK(resolve_alphas(c, 2) == default_alphas(2));
  c.alphas = {1.5};
  CHECK(resolve_alphas(c, 2) == spread_alpha(1.5, 2));
  c.alphas = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(resolve_alphas(c, 2), InputError);
  c.points = 3;
  CHECK(resolve_grid(c) == std::vector<double>{0.25, 0.5, 0.75});
  c.grid = {0.5};
  CHECK(resolve_grid(c) == std::vector<double>{0.5});
  c.closure = "nonsense";
  CHECK_THROWS_AS(make_flow_config(c), InputError);
}
