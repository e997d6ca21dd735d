#include "aubin/aubin.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

aubin::RatVec parse_direction(const std::string& csv) {
  aubin::RatVec h;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = csv.find(',', start);
    std::string item = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    h.push_back(aubin::Rat::parse(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return h;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verifier of the Aubin property for parametrized generalized equations with polyhedral sets"};
  aubin::RunConfig cfg;
  std::vector<std::string> directions;
  std::string route = "auto", format = "text";
  std::size_t samples = 0;

  app.add_option("--problem", cfg.problem_path, "Problem file")->required();
  app.add_option("--direction", directions, "Direction h as comma-separated rationals (repeatable)");
  app.add_option("--route", route, "auto, thm5, thm6 or cor1")->check(CLI::IsMember({"auto", "thm5", "thm6", "cor1"}));
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  auto* oracle = app.add_option("--oracle", samples, "Run the sampling cross-checks with N samples");
  app.add_option("--seed", cfg.oracle_seed, "Seed for the oracle mode");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  cfg.route = *aubin::parse_route(route);
  cfg.format = format == "json" ? aubin::ReportFormat::Json : aubin::ReportFormat::Text;
  if (oracle->count()) cfg.oracle_samples = samples;
  try {
    for (const auto& d : directions) cfg.directions.push_back(parse_direction(d));
  } catch (const std::exception& e) {
    std::cerr << "error: bad --direction: " << e.what() << "\n";
    return 2;
  }
  return aubin::run(cfg, std::cout, std::cerr);
}
