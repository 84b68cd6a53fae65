// tricover: build three affine-plane charts covering a blown-up P^2 or
// Hirzebruch surface, verify the cover, and print a report.
//
// Exit codes: 0 success, 1 parse or validation error, 2 construction
// failure, 3 verification failure.

#include "tricover/report.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>

namespace {

using namespace tricover;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Options {
  std::string input;
  std::uint64_t seed = 0;
  int max_retries = 64;
  int samples = 1000;
  std::string format = "json";
  std::string verify_only;
  bool quiet = false;
  bool timings = false;
};

int verify_stored(const Options& opt) {
  Json report;
  try {
    std::string text = read_file(opt.verify_only);
    report = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::cerr << "error: " << opt.verify_only << ": " << e.what() << "\n";
    return 1;
  }
  ReplayOutcome r = replay_certificate(report);
  if (!opt.quiet) {
    for (const auto& p : r.problems) std::cout << "replay: " << p << "\n";
    std::cout << "stored certificate: " << (r.certificate_passed ? "PASS" : "FAIL")
              << ", replay: " << (r.problems.empty() ? "identical" : "differs") << "\n";
  }
  return r.ok() ? 0 : 3;
}

int run(const Options& opt) {
  SurfacePresentation sp = parse_presentation(read_file(opt.input));
  if (!opt.quiet)
    for (const auto& w : validate_presentation(sp)) std::cerr << "warning: " << w << "\n";

  ChoiceConfig cfg;
  cfg.seed = opt.seed;
  cfg.max_retries = opt.max_retries;
  RunTimings t;
  auto t0 = Clock::now();
  TriCover cover;
  try {
    cover = construct_cover(sp, cfg);
  } catch (const ChoiceError& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return 2;
  } catch (const GeometryError& e) {
    std::cerr << "construction failed: " << e.what() << "\n";
    return 2;
  }
  t.construct = seconds_since(t0);

  t0 = Clock::now();
  CoverageCertificate cert = certify(cover, opt.samples, {opt.seed});
  t.certify = seconds_since(t0);
  t0 = Clock::now();
  TransitionReport tr = verify_transitions(cover, 20, opt.seed);
  t.transitions = seconds_since(t0);

  Json report = report_json(cover, cert, tr, opt.seed, opt.timings ? &t : nullptr);
  if (!opt.quiet) {
    if (opt.format == "json") std::cout << report.dump(2) << "\n";
    else std::cout << report_text(report);
  }
  if (!cover.replay_audit()) {
    std::cerr << "internal error: a logged choice no longer passes its predicates\n";
    return 3;
  }
  if (!cert.passed() || !tr.passed()) {
    std::cerr << "internal error: construction succeeded but the certificate failed\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Three affine-plane charts covering a rational surface, with a certificate"};
  Options opt;
  auto* input = app.add_option("--input", opt.input, "Surface presentation (JSON)");
  app.add_option("--seed", opt.seed, "Seed for generic choices and sampling");
  app.add_option("--max-retries", opt.max_retries, "Candidates tried per generic choice")
      ->check(CLI::PositiveNumber);
  app.add_option("--samples", opt.samples, "Random points for the coverage check")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  auto* verify = app.add_option("--verify-only", opt.verify_only, "Re-check the certificate of a stored JSON report");
  app.add_flag("--quiet", opt.quiet, "Print nothing; use the exit code");
  app.add_flag("--timings", opt.timings, "Include wall-clock timings in the report");
  input->excludes(verify);
  try {
    app.parse(argc, argv);
    if (input->count() == 0 && verify->count() == 0) throw CLI::RequiredError("--input or --verify-only");
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    return opt.verify_only.empty() ? run(opt) : verify_stored(opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
