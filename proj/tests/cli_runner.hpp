#pragma once

// Runs the nlps executable and compares the files it writes.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "nlps/corpus_io.hpp"

namespace cli {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

inline std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

inline Result run(const std::vector<std::string>& args, const std::filesystem::path& scratch) {
    std::string cmd = quote(NLPS_CLI_PATH);
    for (const std::string& a : args) cmd += " " + quote(a);
    auto out = scratch / ".stdout", err = scratch / ".stderr";
    cmd += " >" + quote(out.string()) + " 2>" + quote(err.string());
    int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = nlps::read_file(out);
    r.err = nlps::read_file(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

// File contents with run-dependent fields removed: evaluation timing and
// manifest timestamps.
inline std::string stable_content(const std::filesystem::path& p) {
    std::string data = nlps::read_file(p);
    if (p.extension() != ".json") return data;
    nlps::json j = nlps::json::parse(data);
    if (j.is_object()) {
        j.erase("timing_ms");
        j.erase("started_at");
        j.erase("finished_at");
    }
    return j.dump();
}

// Relative path -> stable content for every file under `dir`, with
// absolute paths to `dir` replaced so two output roots compare equal.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& item : std::filesystem::recursive_directory_iterator(dir)) {
        if (!item.is_regular_file()) continue;
        std::string content = stable_content(item.path());
        for (std::size_t at; (at = content.find(dir.string())) != std::string::npos;)
            content.replace(at, dir.string().size(), "<root>");
        out[std::filesystem::relative(item.path(), dir).generic_string()] = content;
    }
    return out;
}

// Every artifact-producing subcommand on the fixture, writing under `root`.
// Returns the first failing command line, or an empty string.
inline std::string run_pipeline(const std::filesystem::path& fixture_dir, const std::filesystem::path& root) {
    const std::string r = root.string(), c = r + "/corpus";
    const std::vector<std::vector<std::string>> steps = {
        {"build", "--source", (fixture_dir / "wiki").string(), "--out", c, "--min-count", "1", "--workers", "3"},
        {"tokenize", "--in", c, "--strategy", "char", "--out", r + "/tokens.jsonl"},
        {"stats", "--corpus", c, "--out", r + "/stats.json"},
        {"hops", "--corpus", c, "--k", "2", "--out", r + "/hops.json"},
        {"train", "--method", "tfidf", "--strategy", "tokenised", "--corpus", c, "--out", r + "/tfidf.bin"},
        {"train", "--method", "pvdbow", "--strategy", "char", "--tokens", r + "/tokens.jsonl", "--dim", "8",
         "--epochs", "3", "--min-count", "1", "--out", r + "/pvdbow.bin"},
        {"evaluate", "--model", r + "/tfidf.bin", "--corpus", c, "--strategy", "tokenised", "--out",
         r + "/eval_tfidf.json"},
        {"evaluate", "--model", r + "/pvdbow.bin", "--corpus", c, "--strategy", "char", "--workers", "2", "--out",
         r + "/eval_pvdbow.json"},
        {"export-pairs", "--corpus", c, "--hops", "2", "--negative-ratio", "2", "--out", r + "/pairs"},
    };
    for (const auto& args : steps) {
        Result res = run(args, root);
        if (res.code != 0) {
            std::string line;
            for (const auto& a : args) line += a + " ";
            return line + "-> exit " + std::to_string(res.code) + ": " + res.err;
        }
    }
    return {};
}

}  // namespace cli
