// Exit-code contract of the command-line tool: 0 success, 1 usage error,
// 2 data/processing error.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "vowelrec/audio.hpp"

#ifndef VOWELREC_CLI_PATH
#define VOWELREC_CLI_PATH "vowelrec"
#endif

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string("\"") + VOWELREC_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path temp_root() {
    static const fs::path dir = [] {
        auto d =
            fs::temp_directory_path() / ("vowelrec_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("help and version-style invocations exit 0") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("synth --help") == 0);
}

TEST_CASE("usage problems exit 1") {
    CHECK(run_cli("") == 1);                       // missing subcommand
    CHECK(run_cli("no_such_subcommand") == 1);     // unknown subcommand
    CHECK(run_cli("train --manifest x.csv") == 1); // missing required --model
    CHECK(run_cli("segment") == 1);                // missing positional
}

TEST_CASE("data and processing problems exit 2") {
    CHECK(run_cli("segment /nonexistent/file.wav") == 2);
    CHECK(run_cli("eval --model /nonexistent/model.json --manifest x.csv") == 2);

    const fs::path garbage = temp_root() / "garbage.wav";
    std::ofstream(garbage) << "RIFF not really a wav";
    CHECK(run_cli("segment \"" + garbage.string() + "\"") == 2);
}

TEST_CASE("a silence-only file surfaces NoVowelFound with a nonzero exit") {
    vowelrec::AudioClip silence;
    silence.sample_rate = 16000;
    silence.samples.assign(32000, 0.0);
    const fs::path p = temp_root() / "silence.wav";
    vowelrec::write_wav(silence, p, vowelrec::WavBitDepth::Pcm16);
    CHECK(run_cli("segment \"" + p.string() + "\"") == 2);
}
