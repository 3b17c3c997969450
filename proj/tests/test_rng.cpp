#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "survlab/parallel.hpp"
#include "survlab/rng.hpp"
#include "survlab/specfun.hpp"

using namespace survlab;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using C = std::array<std::uint32_t, 4>;
    using K = std::array<std::uint32_t, 2>;
    CHECK(philox4x32(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
    const RngSeed root{12345, 0};
    RandomStream a(root), b(root), c(root.child(0)), d(root.child(1));
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        firsts.insert(va);
    }
    CHECK(c.next_u64() != d.next_u64());
    CHECK(root.child(7) == root.child(7));
    CHECK(root.child(7).child(0) != root.child(0).child(7));
    CHECK(RandomStream(RngSeed{1, 0}).next_u64() != RandomStream(RngSeed{2, 0}).next_u64());
    CHECK(firsts.size() == 100);
}

TEST_CASE("uniforms lie in (0, 1) with the right moments") {
    RandomStream s(RngSeed{42, 3});
    const int n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sum2 += u * u;
    }
    const double mean = sum / n, var = sum2 / n - mean * mean;
    CHECK(std::abs(mean - 0.5) <= 5.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(var - 1.0 / 12.0) <= 0.002);
}

TEST_CASE("normals pass a binned chi-square test") {
    RandomStream s(RngSeed{7, 0});
    const int n = 200000;
    // 10 equiprobable bins from normal deciles
    const double edges[9] = {-1.2815515655446004, -0.8416212335729143, -0.5244005127080407,
                             -0.2533471031357997, 0.0, 0.2533471031357997, 0.5244005127080407,
                             0.8416212335729143, 1.2815515655446004};
    int counts[10] = {};
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum2 += z * z;
        int b = 0;
        while (b < 9 && z > edges[b]) ++b;
        ++counts[b];
    }
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - n / 10.0) * (c - n / 10.0) / (n / 10.0);
    CHECK(specfun::chi2_sf(chi2, 9) > 1e-3);
    CHECK(std::abs(sum / n) <= 5.0 / std::sqrt(n));
    CHECK(std::abs(sum2 / n - 1.0) <= 0.02);
}

TEST_CASE("parallel_map keeps index order and propagates errors") {
    for (unsigned threads : {1u, 2u, 4u}) {
        const auto out = parallel_map(1000, threads, [](std::size_t i) {
            RandomStream s(RngSeed{9, 0}.child(i));
            return s.next_u64();
        });
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == RandomStream(RngSeed{9, 0}.child(i)).next_u64());
    }
    CHECK_THROWS_AS(parallel_map(100, 3,
                                 [](std::size_t i) -> int {
                                     if (i == 57) throw std::runtime_error("boom");
                                     return 0;
                                 }),
                    std::runtime_error);
}
