#include "doctest.h"

#include "lab/report.hpp"
#include "lab/rng.hpp"

#include <limits>

using namespace lab;

TEST_CASE("fnv1a matches the published vectors and the hex width is fixed") {
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hash_hex(0xaf63dc4c8601ec8cull) == "af63dc4c8601ec8c");
    CHECK(hash_hex(0x5ull) == "0000000000000005");
    CHECK(taming_from(taming_name(TamingVariant::grand_canonical)) ==
          TamingVariant::grand_canonical);
    CHECK_THROWS(taming_from("tilted"));
}

TEST_CASE("field snapshot round-trips bitwise including the plane mirrors") {
    SpectralField u(3);
    Rng rng(stream_key(99, 1, 2, 3));
    draw_free_field(u, rng);
    u.set({1, -2, 0}, {0.25, -0.75});  // exercise the mirrored plane write

    const std::string text = field_to_json(u);
    SpectralField v = field_from_json(text);
    REQUIRE(v.N == u.N);
    bool same = true;
    for (std::size_t i = 0; i < u.a.size(); ++i)
        same = same && u.a[i].real() == v.a[i].real() && u.a[i].imag() == v.a[i].imag();
    CHECK(same);
    CHECK(v.max_asymmetry() == 0.0);

    // serialization is a pure function of the field
    CHECK(field_to_json(v) == text);
    CHECK_THROWS(field_from_json("{\"container\":\"other\"}"));
}

TEST_CASE("diagram csv keeps the frozen header and json mirrors the rows") {
    std::vector<DiagramRow> rows{{"tadpole", 1, 0, 0.0, 10.0}, {"sunset", 2, 0, 0.0, 123.5}};
    const std::string csv = to_csv(rows);
    CHECK(csv.substr(0, csv.find('\n')) == "kind,N,M,lambda,value");
    CHECK(csv.find("tadpole,1,0,0,10\n") != std::string::npos);

    const std::string js = to_json(rows);
    CHECK(js.find("\"tadpole\"") != std::string::npos);
    CHECK(js.find("\"rows\"") != std::string::npos);
}

TEST_CASE("manifest is deterministic and the spec echo survives an infinite cutoff") {
    std::vector<Artifact> arts{{"a.csv", fnv1a64("body"), 4}};
    const std::string m1 = manifest_json("run=1\nseed=7\n", 7, arts);
    const std::string m2 = manifest_json("run=1\nseed=7\n", 7, arts);
    CHECK(m1 == m2);
    CHECK(m1.find(kCodeVersion) != std::string::npos);
    CHECK(m1.find(hash_hex(fnv1a64("run=1\nseed=7\n"))) != std::string::npos);

    PotentialSpec spec;
    spec.K = std::numeric_limits<double>::infinity();
    const std::string js = to_json(spec);
    CHECK(js.find("\"inf\"") != std::string::npos);
    CHECK(js.find("null") == std::string::npos);
}
