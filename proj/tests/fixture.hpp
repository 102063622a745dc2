#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "nlps/corpus.hpp"
#include "nlps/wiki/build.hpp"

namespace fixture {

inline std::filesystem::path dir() { return NLPS_FIXTURE_DIR; }

// The bundled 12-page corpus; categories are kept down to one member.
inline nlps::wiki::BuildResult build() {
    nlps::wiki::BuildOptions opts;
    opts.min_count = 1;
    return nlps::wiki::build_corpus(nlps::wiki::load_pages(dir() / "wiki"), opts);
}

inline const nlps::Corpus& corpus() {
    static const nlps::Corpus c = build().corpus;
    return c;
}

inline std::filesystem::path scratch(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("nlps_test_" + name + "_" + std::to_string(std::random_device{}()));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixture
