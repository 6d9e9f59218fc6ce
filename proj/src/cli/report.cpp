#include "rankcal/cli/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rankcal/csv.hpp"
#include "rankcal/errors.hpp"

namespace rankcal::cli {

std::string histogram_csv(const RankHistogram& h) {
  std::ostringstream os;
  os << "rank,count\n";
  for (std::size_t r = 0; r < h.m(); ++r) os << (r + 1) << ',' << h.counts()[r] << '\n';
  return os.str();
}

nlohmann::ordered_json summary_json(std::string_view method, const RankHistogram& h) {
  nlohmann::ordered_json j;
  j["method"] = method;
  j["m"] = h.m();
  j["n_cases"] = h.n_cases();
  j["counts"] = std::vector<std::uint64_t>(h.counts().begin(), h.counts().end());
  if (h.n_cases() > 0) {
    const auto s = histogram_summary(h);
    j["mean_rank"] = s.mean_rank;
    j["rank_variance"] = s.rank_variance;
    j["chi_square"] = s.chi_square;
  } else {
    j["mean_rank"] = nullptr;
    j["rank_variance"] = nullptr;
    j["chi_square"] = nullptr;
  }
  return j;
}

std::string histogram_svg(std::string_view title, const RankHistogram& h) {
  constexpr int bar = 20;
  constexpr int gap = 2;
  constexpr int plot_height = 200;
  constexpr int margin = 30;
  const int bins = static_cast<int>(h.m());
  const int width = 2 * margin + bins * (bar + gap);
  const int height = plot_height + 2 * margin;
  const double expected = h.n_cases() > 0 ? static_cast<double>(h.n_cases()) / bins : 0.0;
  std::uint64_t peak = 0;
  for (auto c : h.counts()) peak = std::max(peak, c);
  const double top = std::max(static_cast<double>(peak), expected * 1.25);
  auto scale = [&](double v) { return top > 0.0 ? v / top * plot_height : 0.0; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << title
     << " (n=" << h.n_cases() << ")</text>\n";
  for (int r = 0; r < bins; ++r) {
    const double hgt = scale(static_cast<double>(h.counts()[static_cast<std::size_t>(r)]));
    os << "<rect x=\"" << margin + r * (bar + gap) << "\" y=\"" << csv::format_double(margin + plot_height - hgt)
       << "\" width=\"" << bar << "\" height=\"" << csv::format_double(hgt) << "\" fill=\"#7a8fa6\"/>\n";
  }
  const double y = margin + plot_height - scale(expected);
  os << "<line x1=\"" << margin << "\" x2=\"" << width - margin << "\" y1=\"" << csv::format_double(y)
     << "\" y2=\"" << csv::format_double(y) << "\" stroke=\"#c0392b\" stroke-dasharray=\"4 3\"/>\n";
  os << "<text x=\"" << margin << "\" y=\"" << height - 8
     << "\" font-family=\"sans-serif\" font-size=\"11\">rank 1</text>\n";
  os << "<text x=\"" << width - margin << "\" y=\"" << height - 8
     << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">rank " << bins << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + file.string() + "'");
  out << text;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + file.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["argv"] = argv;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["workers"] = workers;
  j["version"] = version;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["duration_seconds"] = duration_seconds;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.parameters = j.value("parameters", nlohmann::json::object());
    m.seed = j.value("seed", std::uint64_t{0});
    m.workers = j.value("workers", 1u);
    m.inputs = j.value("inputs", std::vector<std::string>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.duration_seconds = j.value("duration_seconds", 0.0);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace rankcal::cli
