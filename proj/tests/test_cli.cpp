#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dspec/cli.hpp"

using namespace dspec;
namespace fs = std::filesystem;

namespace {

const std::string kFixture = std::string(FIXTURE_DIR) + "/diamond_pa_pr.json";

struct CaptureStream {
    std::ostream& target;
    std::ostringstream buffer;
    std::streambuf* saved;
    explicit CaptureStream(std::ostream& os) : target(os), saved(os.rdbuf(buffer.rdbuf())) {}
    ~CaptureStream() { target.rdbuf(saved); }
    std::string text() const { return buffer.str(); }
};

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("dspec_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(std::move(cells));
    }
    return rows;
}

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

std::set<std::string> dir_listing(const fs::path& dir) {
    std::set<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) names.insert(entry.path().filename());
    return names;
}

}  // namespace

TEST_CASE("usage problems exit with code 2") {
    CaptureStream out(std::cout);
    CaptureStream err(std::cerr);
    CHECK(cli::run({}) == 2);
    CHECK(cli::run({"frobnicate"}) == 2);
    CHECK(cli::run({"thermo"}) == 2);  // no input dataset
    CHECK(cli::run({"levels", "-i", kFixture}) == 2);  // --system is required
    CHECK(cli::run({"correction"}) == 2);
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--sweep", "nope"}) == 2);
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--sweep", "1:0:5"}) == 2);
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--effective", "--axis",
                    "x"}) == 2);
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--zfs-convention",
                    "weird"}) == 2);
    CHECK(err.text().find("error") != std::string::npos);
}

TEST_CASE("data problems exit with code 1") {
    CaptureStream err(std::cerr);
    const fs::path dir = fresh_dir("errors");
    CHECK(cli::run({"thermo", "-i", "/nonexistent/nothing.json", "-o", dir.string()}) == 1);
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "nope", "-o", dir.string()}) == 1);
    CHECK(cli::run({"stark", "-i", kFixture, "--system", "nope", "-o", dir.string()}) == 1);

    const fs::path bad = fs::temp_directory_path() / "dspec_cli_bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK(cli::run({"thermo", "-i", bad.string(), "-o", dir.string()}) == 1);
    fs::remove(bad);
    fs::remove_all(dir);
}

TEST_CASE("version and help exit cleanly") {
    CaptureStream out(std::cout);
    CaptureStream err(std::cerr);
    CHECK(cli::run({"--version"}) == 0);
    CHECK(cli::run({"--help"}) == 0);
    CHECK(out.text().find("thermo") != std::string::npos);
}

TEST_CASE("correction prints its table and writes files only on request") {
    fs::remove_all("out");
    std::string captured;
    {
        CaptureStream out(std::cout);
        CHECK(cli::run({"correction", "--charge", "2", "--cell-length", "10", "--epsilon",
                        "5.7"}) == 0);
        captured = out.text();
    }
    CHECK_FALSE(fs::exists("out"));  // no -o given, stdout only

    const auto rows = parse_csv(captured);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == std::vector<std::string>{"E_corr_eV", "nu"});
    CHECK(std::stod(rows[1][0]) == Catch::Approx(madelung_correction(2, 10.0, 5.7)).epsilon(1e-10));
    CHECK(std::stod(rows[1][1]) == Catch::Approx(madelung_nu()).epsilon(1e-10));

    std::string unscreened;
    {
        CaptureStream out(std::cout);
        CHECK(cli::run({"correction", "--charge", "2", "--cell-length", "10", "--epsilon",
                        "1"}) == 0);
        unscreened = out.text();
    }
    const auto rows1 = parse_csv(unscreened);
    CHECK(std::stod(rows1[1][0]) == Catch::Approx(5.7 * std::stod(rows[1][0])).epsilon(1e-9));

    const fs::path dir = fresh_dir("correction");
    {
        CaptureStream out(std::cout);
        CHECK(cli::run({"correction", "--charge", "2", "--cell-length", "10", "--epsilon", "5.7",
                        "-o", dir.string()}) == 0);
    }
    CHECK(dir_listing(dir) == std::set<std::string>{"correction.csv", "run_manifest.json"});
    const json manifest = json::parse(read_text(dir / "run_manifest.json"));
    CHECK(manifest["subcommand"] == "correction");
    CHECK(manifest["input_path"] == "");
    CHECK(manifest["parameters"]["charge"] == "2");
    CHECK(manifest["parameters"]["cell_length_A"] == "10");
    CHECK(manifest["parameters"]["epsilon_s"] == "5.7");
    fs::remove_all(dir);
}

TEST_CASE("thermo writes the full table set") {
    const fs::path dir = fresh_dir("thermo");
    CHECK(cli::run({"thermo", "-i", kFixture, "-o", dir.string()}) == 0);
    CHECK(dir_listing(dir) ==
          std::set<std::string>{"formation_lines.csv", "transition_levels.csv", "stability.csv",
                                "formation_PaV2.svg", "formation_PrV2.svg", "run_manifest.json"});

    const auto lines = parse_csv(read_text(dir / "formation_lines.csv"));
    REQUIRE(lines.size() == 11);  // header + 10 entries
    CHECK(lines[0] == std::vector<std::string>{"label", "q", "intercept_eV", "slope"});
    CHECK(lines[1][0] == "PaV2");
    CHECK(lines[1][1] == "-3");  // sorted by label then charge
    CHECK(lines[1][3] == "-3");  // slope equals the charge
    CHECK(lines[10][0] == "PrV2");
    CHECK(lines[10][1] == "1");

    const auto ctls = parse_csv(read_text(dir / "transition_levels.csv"));
    REQUIRE(ctls.size() == 9);  // 4 adjacent pairs per family
    CHECK(ctls[0] == std::vector<std::string>{"label", "q1", "q2", "level_eV"});
    CHECK(ctls[1][0] == "PaV2");
    CHECK(ctls[1][1] == "1");
    CHECK(ctls[1][2] == "0");
    CHECK(std::stod(ctls[1][3]) == Catch::Approx(1.0).margin(1e-6));
    CHECK(std::stod(ctls[4][3]) == Catch::Approx(4.2).margin(1e-6));

    const auto stab = parse_csv(read_text(dir / "stability.csv"));
    REQUIRE(stab.size() == 11);  // 5 intervals per family
    CHECK(stab[0] == std::vector<std::string>{"label", "fermi_min_eV", "fermi_max_eV", "q"});
    CHECK(stab[1][1] == "0");
    CHECK(stab[1][3] == "1");
    for (int k = 1; k < 5; ++k) CHECK(stab[k][2] == stab[k + 1][1]);  // partition, byte-exact
    CHECK(stab[5][2] == "5.5");
    CHECK(stab[5][3] == "-3");

    const json manifest = json::parse(read_text(dir / "run_manifest.json"));
    CHECK(manifest["subcommand"] == "thermo");
    CHECK(manifest["input_path"] == kFixture);
    const std::string hash = manifest["input_hash"];
    CHECK(hash == fnv1a64_hex(read_text(kFixture)));
    CHECK(hash.size() == 16);
    CHECK(hash.find_first_not_of("0123456789abcdef") == std::string::npos);

    const std::string svg = read_text(dir / "formation_PaV2.svg");
    CHECK(svg.rfind("<svg xmlns", 0) == 0);
    CHECK(svg.find("</svg>\n") != std::string::npos);
    CHECK(count_occurrences(svg, "<polyline") == 5);
    CHECK(count_occurrences(svg, "<circle") == 4);  // one marker per interior breakpoint
    CHECK(svg.find("PaV2 q=+1") != std::string::npos);
    CHECK(svg.find("PaV2 q=-3") != std::string::npos);
    CHECK(svg.find("Fermi level (eV)") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("levels writes one row per field point and level") {
    const fs::path dir = fresh_dir("levels");
    CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "-o", dir.string()}) == 0);
    CHECK(dir_listing(dir) == std::set<std::string>{"levels_PaV2_m1.csv", "levels_PaV2_m1.svg",
                                                    "run_manifest.json"});
    auto rows = parse_csv(read_text(dir / "levels_PaV2_m1.csv"));
    REQUIRE(rows.size() == 19);  // header + 18 levels at the single default field
    CHECK(rows[0] == std::vector<std::string>{"B_T", "index", "E_MHz", "m_S", "m_I"});
    for (int k = 1; k <= 18; ++k) {
        CHECK(rows[static_cast<std::size_t>(k)][0] == "0");
        CHECK(rows[static_cast<std::size_t>(k)][1] == std::to_string(k - 1));
        const double mi = std::stod(rows[static_cast<std::size_t>(k)][4]);
        CHECK(std::abs(std::abs(mi) * 2.0 - std::round(std::abs(mi) * 2.0)) < 1e-12);
        CHECK(std::abs(mi) <= 2.5);
    }
    const std::string svg = read_text(dir / "levels_PaV2_m1.svg");
    CHECK(count_occurrences(svg, "<polyline") == 18);
    CHECK(svg.find("Level energy (MHz)") != std::string::npos);

    SECTION("sweep multiplies the row count") {
        const fs::path dir2 = fresh_dir("levels_sweep");
        CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m2", "--sweep", "0:0.2:5",
                        "-o", dir2.string()}) == 0);
        const auto swept = parse_csv(read_text(dir2 / "levels_PaV2_m2.csv"));
        CHECK(swept.size() == 1 + 5 * 12);
        CHECK(swept[1][0] == "0");
        CHECK(swept.back()[0] == "0.2");
        const json manifest = json::parse(read_text(dir2 / "run_manifest.json"));
        CHECK(manifest["parameters"]["sweep"] == "0:0.2:5");
        CHECK(manifest["parameters"]["system"] == "PaV2_m2");
        fs::remove_all(dir2);
    }

    SECTION("the two rhombic conventions give different spectra") {
        const fs::path paper = fresh_dir("levels_paper");
        const fs::path conv = fresh_dir("levels_conv");
        CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "-o",
                        paper.string()}) == 0);
        CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--zfs-convention",
                        "conventional", "-o", conv.string()}) == 0);
        CHECK(read_text(paper / "levels_PaV2_m1.csv") != read_text(conv / "levels_PaV2_m1.csv"));
        fs::remove_all(paper);
        fs::remove_all(conv);
    }

    SECTION("effective reduction stays diagonal") {
        const fs::path dir3 = fresh_dir("levels_eff");
        CHECK(cli::run({"levels", "-i", kFixture, "--system", "PaV2_m1", "--effective", "--B",
                        "0.5", "-o", dir3.string()}) == 0);
        const auto rows3 = parse_csv(read_text(dir3 / "levels_PaV2_m1.csv"));
        CHECK(rows3.size() == 19);
        CHECK(rows3[1][0] == "0.5");
        fs::remove_all(dir3);
    }
    fs::remove_all(dir);
}

TEST_CASE("selection emits one verdict per transition") {
    const fs::path dir = fresh_dir("selection");
    CHECK(cli::run({"selection", "-i", kFixture, "-o", dir.string()}) == 0);
    const auto rows = parse_csv(read_text(dir / "transition_verdicts.csv"));
    REQUIRE(rows.size() == 8);
    CHECK(rows[0] == std::vector<std::string>{"label", "charge", "channel", "ground", "excited",
                                              "ground_state", "excited_state", "promotion",
                                              "polarizations"});
    // explicit two-configuration sets
    CHECK(rows[1] == std::vector<std::string>{"PaV2", "-2", "up", "ground", "excited", "2A1",
                                              "2B2", "a1[3]->b2[5]", "y"});
    CHECK(rows[2] == std::vector<std::string>{"PaV2", "-1", "down", "ground", "excited", "3B2",
                                              "3A2", "b1[2]->a1[3]", "x"});
    // single-configuration set: every one-electron promotion in the channel
    const std::vector<std::string> expected_excited = {"promote_0_to_5", "promote_1_to_5",
                                                       "promote_2_to_5", "promote_3_to_5",
                                                       "promote_4_to_5"};
    const std::vector<std::string> expected_state = {"4A2", "4B1", "4B2", "2A2", "4B1"};
    const std::vector<std::string> expected_pol = {"", "x", "y", "", "x"};
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& row = rows[3 + k];
        CHECK(row[0] == "PrV2");
        CHECK(row[1] == "-2");
        CHECK(row[2] == "up");
        CHECK(row[3] == "ground");
        CHECK(row[4] == expected_excited[k]);
        CHECK(row[5] == "2A1");
        CHECK(row[6] == expected_state[k]);
        CHECK(row[8] == expected_pol[k]);
    }
    CHECK(rows[3][7] == "a1[0]->a2[5]");
    CHECK(rows[7][7] == "b2[4]->a2[5]");
    fs::remove_all(dir);
}

TEST_CASE("stark fits every series by default") {
    const fs::path dir = fresh_dir("stark");
    CHECK(cli::run({"stark", "-i", kFixture, "-o", dir.string()}) == 0);
    const auto rows = parse_csv(read_text(dir / "stark_fits.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"label", "delta_mu_eA", "delta_mu_debye",
                                              "sigma_delta_mu_eA", "delta_alpha_A2e_per_V",
                                              "delta_alpha_a0_cubed",
                                              "sigma_delta_alpha_A2e_per_V", "residual_rms_eV",
                                              "E_eff_GV_per_cm"});
    CHECK(rows[1][0] == "PaV2_m1");
    CHECK(std::stod(rows[1][1]) == Catch::Approx(0.02).margin(1e-9));
    CHECK(std::stod(rows[1][2]) == Catch::Approx(0.02 * constants::debye_per_e_angstrom)
                                       .epsilon(1e-7));
    CHECK(std::stod(rows[1][4]) == Catch::Approx(0.025).margin(1e-9));
    CHECK(rows[2][0] == "PaV2_m2");
    CHECK(std::stod(rows[2][1]) == Catch::Approx(1.23).margin(1e-9));
    CHECK(std::stod(rows[2][8]) == Catch::Approx(1.771156).epsilon(1e-5));

    SECTION("explicit system, geometry and screening options") {
        const fs::path dir2 = fresh_dir("stark_opts");
        CHECK(cli::run({"stark", "-i", kFixture, "--system", "PaV2_m2", "--z-scale", "2",
                        "--shielding", "3", "-o", dir2.string()}) == 0);
        const auto one = parse_csv(read_text(dir2 / "stark_fits.csv"));
        REQUIRE(one.size() == 2);
        CHECK(one[1][0] == "PaV2_m2");
        CHECK(std::stod(one[1][8]) ==
              Catch::Approx(std::stod(rows[2][8]) / 24.0).epsilon(1e-9));
        const json manifest = json::parse(read_text(dir2 / "run_manifest.json"));
        CHECK(manifest["parameters"]["epsilon_s"] == "5.7");  // host value by default
        CHECK(manifest["parameters"]["z_scale_A"] == "2");
        CHECK(manifest["parameters"]["shielding"] == "3");
        fs::remove_all(dir2);
    }

    SECTION("explicit epsilon-s overrides the host dielectric") {
        const fs::path dir3 = fresh_dir("stark_eps");
        CHECK(cli::run({"stark", "-i", kFixture, "--system", "PaV2_m2", "--epsilon-s", "1", "-o",
                        dir3.string()}) == 0);
        const auto raw = parse_csv(read_text(dir3 / "stark_fits.csv"));
        CHECK(std::stod(raw[1][1]) == Catch::Approx(1.23 / 5.7).epsilon(1e-9));
        fs::remove_all(dir3);
    }
    fs::remove_all(dir);
}

TEST_CASE("stdout mode prints named tables and writes nothing") {
    fs::remove_all("out");
    std::string captured;
    {
        CaptureStream out(std::cout);
        CHECK(cli::run({"all", "-i", kFixture, "--stdout", "--sweep", "0:0.2:3"}) == 0);
        captured = out.text();
    }
    CHECK_FALSE(fs::exists("out"));
    for (const char* name : {"# formation_lines.csv", "# transition_levels.csv",
                             "# stability.csv", "# levels_PaV2_m1.csv", "# levels_PrV2_m2.csv",
                             "# transition_verdicts.csv", "# stark_fits.csv"})
        CHECK(captured.find(name) != std::string::npos);
    CHECK(captured.find("run_manifest") == std::string::npos);
    CHECK(captured.find("<svg") == std::string::npos);
}

TEST_CASE("all produces the complete artifact set, byte-reproducibly") {
    const fs::path dir_a = fresh_dir("all_a");
    const fs::path dir_b = fresh_dir("all_b");
    CHECK(cli::run({"all", "-i", kFixture, "--sweep", "0:0.2:5", "-o", dir_a.string()}) == 0);
    CHECK(cli::run({"all", "-i", kFixture, "--sweep", "0:0.2:5", "-o", dir_b.string()}) == 0);

    const std::set<std::string> expected = {
        "formation_lines.csv",  "transition_levels.csv", "stability.csv",
        "formation_PaV2.svg",   "formation_PrV2.svg",    "levels_PaV2_m1.csv",
        "levels_PaV2_m1.svg",   "levels_PaV2_m2.csv",    "levels_PaV2_m2.svg",
        "levels_PrV2_m1.csv",   "levels_PrV2_m1.svg",    "levels_PrV2_m2.csv",
        "levels_PrV2_m2.svg",   "transition_verdicts.csv", "stark_fits.csv",
        "run_manifest.json"};
    CHECK(dir_listing(dir_a) == expected);
    CHECK(dir_listing(dir_b) == expected);

    for (const std::string& name : expected) {
        if (name == "run_manifest.json") continue;  // records the differing outdir
        INFO(name);
        CHECK(read_text(dir_a / name) == read_text(dir_b / name));
    }

    const json manifest = json::parse(read_text(dir_a / "run_manifest.json"));
    CHECK(manifest["subcommand"] == "all");
    CHECK(manifest["parameters"]["sweep"] == "0:0.2:5");
    CHECK(manifest["parameters"]["epsilon_s"] == "5.7");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}
