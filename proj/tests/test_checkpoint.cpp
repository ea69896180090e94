#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mutec/checkpoint.hpp"
#include "mutec/errors.hpp"

using namespace mutec;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "mutec_ckpt_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("checkpoint round-trips tensors and config") {
    ParamStore store(11);
    store.get_or_create("a.w", 3, 4, Init::scaled_normal);
    store.get_or_create("b.w", 2, 2, Init::scaled_normal);
    store.get_or_create("b.b", 1, 2, Init::zeros);
    store.value("b.b") << 0.25, -1.5;

    RunConfig config = default_config(Task::cee, false);
    config.seed = 11;
    config.lr = 0.02;

    const fs::path path = temp_file("roundtrip.bin");
    save_checkpoint(path, config, store);
    const Checkpoint ckpt = load_checkpoint(path);

    CHECK(ckpt.config.task == Task::cee);
    CHECK(ckpt.config.lr == 0.02);
    CHECK(ckpt.config.seed == 11);
    CHECK(ckpt.tensors.size() == 3);
    CHECK(ckpt.tensors.at("a.w") == store.value("a.w"));
    CHECK(ckpt.tensors.at("b.w") == store.value("b.w"));
    CHECK(ckpt.tensors.at("b.b") == store.value("b.b"));
}

TEST_CASE("restored tensors win over fresh initialization") {
    ParamStore original(3);
    original.get_or_create("p.w", 2, 3, Init::scaled_normal);
    const fs::path path = temp_file("restore.bin");
    save_checkpoint(path, default_config(Task::cse, true), original);

    ParamStore fresh(999);  // different seed on purpose
    restore_into(fresh, load_checkpoint(path));
    const Mat& restored = fresh.get_or_create("p.w", 2, 3, Init::scaled_normal);
    CHECK(restored == original.value("p.w"));
}

TEST_CASE("non-checkpoint files are rejected") {
    const fs::path path = temp_file("bogus.bin");
    std::ofstream(path) << "definitely not a checkpoint";
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
    CHECK_THROWS_AS(load_checkpoint(temp_file("missing.bin")), InputError);
}

TEST_CASE("truncated payload is detected") {
    ParamStore store(5);
    store.get_or_create("big.w", 8, 8, Init::scaled_normal);
    const fs::path path = temp_file("truncated.bin");
    save_checkpoint(path, default_config(Task::cse, true), store);
    const auto size = fs::file_size(path);
    fs::resize_file(path, size - 16);
    CHECK_THROWS_AS(load_checkpoint(path), ParseError);
}
