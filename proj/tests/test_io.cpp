#include <doctest.h>

#include <filesystem>
#include <random>

#include "fpspec/errors.hpp"
#include "fpspec/io.hpp"
#include "test_support.hpp"

using namespace fpspec;
using namespace fpspec::testing;
using io::Json;

TEST_CASE("model documents") {
    const auto m = io::model_from_json(Json::parse(R"({"d":2,"C":[[0,-1],[1,1]],"D":[[0,0],[0,1]]})"));
    CHECK(m.drift == kinetic_model().drift());
    CHECK(m.diffusion == kinetic_model().diffusion());
    const auto back = io::model_from_json(io::model_to_json(m.drift, m.diffusion));
    CHECK(back.drift == m.drift);

    CHECK_THROWS_AS(io::model_from_json(Json::parse(R"({"C":[[1]],"D":[[1]]})")), InputError);
    CHECK_THROWS_AS(io::model_from_json(Json::parse(R"({"d":0,"C":[],"D":[]})")), InputError);
    CHECK_THROWS_AS(io::model_from_json(Json::parse(R"({"d":2,"C":[[1,0]],"D":[[1,0],[0,1]]})")), InputError);
    CHECK_THROWS_AS(io::model_from_json(Json::parse(R"({"d":1,"C":[["x"]],"D":[[1]]})")), InputError);
    CHECK_THROWS_AS(io::model_from_json(Json::parse("[1,2]")), InputError);
    CHECK_THROWS_AS(io::parse_json("{\"d\": 2, "), InputError);
}

TEST_CASE("model hash is stable and distinguishes models") {
    const auto k = kinetic_model(), o = ou_model();
    CHECK(io::model_hash(k.drift(), k.diffusion()) == io::model_hash(k.drift(), k.diffusion()));
    CHECK(io::model_hash(k.drift(), k.diffusion()) != io::model_hash(o.drift(), o.diffusion()));
    CHECK(io::model_hash(k.drift(), k.diffusion()).size() == 16);
}

TEST_CASE("coefficient documents") {
    const auto f = io::coeffs_from_json(Json::parse(R"([{"alpha":[0,0],"value":1},{"alpha":[1,1],"value":-0.5}])"));
    CHECK(f.dim() == 2);
    CHECK(f[MultiIndex{0, 0}] == 1.0);
    CHECK(f[MultiIndex{1, 1}] == -0.5);

    CHECK_THROWS_AS(io::coeffs_from_json(Json::parse(R"([{"alpha":[0,0],"value":1},{"alpha":[1],"value":1}])")),
                    InputError);
    CHECK_THROWS_AS(io::coeffs_from_json(Json::parse(R"([{"alpha":[1,0],"value":1},{"alpha":[1,0],"value":2}])")),
                    InputError);
    CHECK_THROWS_AS(io::coeffs_from_json(Json::parse(R"([{"alpha":[-1,0],"value":1}])")), InputError);
    CHECK_THROWS_AS(io::coeffs_from_json(Json::parse(R"([{"alpha":[1,0]}])")), InputError);
    CHECK_THROWS_AS(io::coeffs_from_json(Json::parse(R"({"alpha":[1,0],"value":1})")), InputError);

    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto g = random_coeffs(rng, 1 + trial % 3, 0, 5);
        const auto text = io::coeffs_to_json(g).dump();
        const auto back = io::coeffs_from_json(io::parse_json(text));
        CHECK((back - g).weighted_norm2() == 0.0);
    }
}

TEST_CASE("number formatting round-trips") {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
        CHECK(std::stod(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(0.0) == "0");
}

TEST_CASE("csv output") {
    std::ostringstream os;
    io::write_csv(os, {"a", "b"}, {{1.0, 0.25}, {2.0, -3.0}});
    CHECK(os.str() == "a,b\n1,0.25\n2,-3\n");
}

TEST_CASE("block documents") {
    const auto j = io::block_to_json(build_block(kinetic_model(), 1));
    CHECK(j["m"] == 1);
    CHECK(j["basis"].size() == 2);
    CHECK(j["B"][0][1].get<double>() == -1.0);
}

TEST_CASE("atomic file writes") {
    const auto dir = std::filesystem::temp_directory_path() / "fpspec_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    io::write_file_atomic(path, "first");
    io::write_file_atomic(path, "second");
    CHECK(io::read_file(path) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
    CHECK(entries == 1);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(io::read_file(dir / "missing.json"), InputError);
}
