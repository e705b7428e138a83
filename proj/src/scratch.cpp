#include <cstdlib>
#include <random>

#include "credigraph/external_sort.hpp"

namespace credigraph {

std::filesystem::path default_scratch_root() {
    if (const char* env = std::getenv("CREDIGRAPH_SCRATCH"); env != nullptr && *env != '\0') {
        return env;
    }
    return std::filesystem::temp_directory_path();
}

ScratchDir::ScratchDir(const std::filesystem::path& root, std::string_view prefix) {
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const auto candidate = root / (std::string(prefix) + "-" + std::to_string(rd()));
        if (std::filesystem::create_directory(candidate, ec)) {
            path_ = candidate;
            return;
        }
    }
    throw IoError("cannot create scratch directory under `" + root.string() + "`");
}

ScratchDir::~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::filesystem::path ScratchDir::next_file(std::string_view stem) {
    return path_ / (std::string(stem) + "-" + std::to_string(counter_++));
}

}  // namespace credigraph
