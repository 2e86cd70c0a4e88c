// SPDX-License-Identifier: Apache-2.0

#include <atomic>

#include "doctest.h"
#include "gar/core/error.hpp"
#include "gar/core/hash.hpp"
#include "gar/core/parallel.hpp"
#include "gar/core/text.hpp"
#include "support.hpp"

using namespace gar;

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fnv1a64 known vectors") {
  static_assert(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("derived seeds are stable and label-sensitive") {
  CHECK(derive_seed(42, "persona") == derive_seed(42, "persona"));
  CHECK(derive_seed(42, "persona") != derive_seed(42, "graph"));
  CHECK(derive_seed(42, "persona") != derive_seed(43, "persona"));
}

TEST_CASE("text helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(text::squash_whitespace(" a \t\n b ") == "a b");
  CHECK(text::words("Hello, World-42!") == std::vector<std::string>{"hello", "world", "42"});
  CHECK(text::estimate_tokens("abcde") == 2);
  CHECK(text::estimate_tokens("") == 0);
  CHECK(text::icontains("Related Introduction", "INTRO"));
}

TEST_CASE("file helpers round-trip and report missing files") {
  testing::TempDir dir("core");
  write_file(dir / "nested/x.txt", "payload");
  CHECK(read_file(dir / "nested/x.txt") == "payload");
  try {
    read_file(dir / "missing");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
  }
}

TEST_CASE("errors serialize code, message and details") {
  const Error e(Errc::MalformedLine, "line 3: bad", {{"line", 3}});
  const auto j = e.to_json();
  CHECK(j.at("error") == "MalformedLine");
  CHECK(j.at("details").at("line") == 3);
}

TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
  std::atomic<int> ran{0};
  try {
    parallel_for(50, 4, [&](std::size_t i) {
      ++ran;
      if (i == 31 || i == 7) throw Error(Errc::Empty, "fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
  CHECK(ran == 50);
}
