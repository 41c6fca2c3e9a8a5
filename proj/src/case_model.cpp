#include "pmu/case_model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "pmu/error.hpp"

namespace pmu {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

double parse_double(std::string_view field, std::size_t line_no, std::string_view what) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw PmuError(ErrorKind::MalformedRecord,
                       where(line_no) + "cannot parse " + std::string(what) + " from '" + std::string(field) + "'");
    }
    return value;
}

int parse_int(std::string_view field, std::size_t line_no, std::string_view what) {
    double v = parse_double(field, line_no, what);
    if (v != std::floor(v)) {
        throw PmuError(ErrorKind::MalformedRecord,
                       where(line_no) + std::string(what) + " is not an integer: '" + std::string(trim(field)) + "'");
    }
    return static_cast<int>(v);
}

// Fixed-width column slice, 1-based inclusive columns. Short lines are padded.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
    if (line.size() < first) return {};
    std::size_t len = std::min(last, line.size()) - (first - 1);
    return line.substr(first - 1, len);
}

double optional_column(std::string_view line, std::size_t first, std::size_t last, std::size_t line_no,
                       std::string_view what) {
    auto field = trim(columns(line, first, last));
    return field.empty() ? 0.0 : parse_double(field, line_no, what);
}

struct Line {
    std::size_t number;
    std::string text;
};

std::vector<Line> split_lines(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    while (!text.empty()) {
        auto pos = text.find('\n');
        auto line = text.substr(0, pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back({++number, std::string(line)});
        if (pos == std::string_view::npos) break;
        text.remove_prefix(pos + 1);
    }
    return lines;
}

bool is_terminator(std::string_view line, std::string_view sentinel) {
    auto t = trim(line);
    if (t.substr(0, sentinel.size()) != sentinel) return false;
    return t.size() == sentinel.size() || std::isspace(static_cast<unsigned char>(t[sentinel.size()]));
}

// Records between the header line starting with `header` and the sentinel.
std::vector<Line> section(const std::vector<Line>& lines, std::string_view header, std::string_view sentinel) {
    auto it = std::find_if(lines.begin(), lines.end(),
                           [&](const Line& l) { return upper(trim(l.text)).rfind(header, 0) == 0; });
    if (it == lines.end()) {
        throw PmuError(ErrorKind::MissingSection, "missing section '" + std::string(header) + "'");
    }
    std::vector<Line> records;
    for (++it; it != lines.end(); ++it) {
        if (is_terminator(it->text, sentinel)) return records;
        if (trim(it->text).empty()) continue;
        records.push_back(*it);
    }
    throw PmuError(ErrorKind::MissingSection,
                   "section '" + std::string(header) + "' is not terminated by " + std::string(sentinel));
}

BusType cdf_bus_type(int code, std::size_t line_no) {
    switch (code) {
        case 0:
        case 1: return BusType::PQ;
        case 2: return BusType::PV;
        case 3: return BusType::Slack;
        default:
            throw PmuError(ErrorKind::MalformedRecord, where(line_no) + "unknown bus type " + std::to_string(code));
    }
}

struct RawBranch {
    int from_id;
    int to_id;
    Branch branch;
    std::size_t line_no;
};

// Maps external ids to positions and checks references; the shared tail of
// both parsers.
PowerCase assemble(std::string name, double mva_base, std::vector<Bus> buses, const std::vector<RawBranch>& raw) {
    PowerCase pc;
    pc.name = std::move(name);
    pc.mva_base = mva_base;
    pc.buses = std::move(buses);
    std::unordered_map<int, int> position;
    for (std::size_t i = 0; i < pc.buses.size(); ++i) {
        if (!position.emplace(pc.buses[i].external_id, static_cast<int>(i)).second) {
            throw PmuError(ErrorKind::DuplicateBusId,
                           "bus id " + std::to_string(pc.buses[i].external_id) + " appears more than once");
        }
    }
    for (const auto& rb : raw) {
        auto from = position.find(rb.from_id);
        auto to = position.find(rb.to_id);
        if (from == position.end() || to == position.end()) {
            int missing = from == position.end() ? rb.from_id : rb.to_id;
            throw PmuError(ErrorKind::UnknownBusReference,
                           where(rb.line_no) + "branch references unknown bus " + std::to_string(missing));
        }
        Branch b = rb.branch;
        b.from_bus = from->second;
        b.to_bus = to->second;
        pc.branches.push_back(b);
    }
    validate(pc);
    return pc;
}

// Shortest decimal degree value that converts back to exactly `radians`.
double degrees_for(double radians) {
    double deg = radians / kDegToRad;
    if (deg * kDegToRad == radians) return deg;
    double up = deg;
    double down = deg;
    for (int step = 0; step < 64; ++step) {
        up = std::nextafter(up, INFINITY);
        down = std::nextafter(down, -INFINITY);
        if (up * kDegToRad == radians) return up;
        if (down * kDegToRad == radians) return down;
    }
    return deg;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        cells.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

// Data rows of a CSV table after checking its header; blank lines skipped.
std::vector<Line> csv_rows(std::string_view text, const std::vector<std::string>& header, std::string_view table) {
    auto lines = split_lines(text);
    auto first = std::find_if(lines.begin(), lines.end(), [](const Line& l) { return !trim(l.text).empty(); });
    if (first == lines.end()) {
        throw PmuError(ErrorKind::MissingSection, "missing " + std::string(table) + " table");
    }
    auto cells = split_csv(first->text);
    for (auto& c : cells) c = upper(c);
    std::vector<std::string> expected;
    for (const auto& h : header) expected.push_back(upper(h));
    if (cells != expected) {
        throw PmuError(ErrorKind::MalformedRecord,
                       where(first->number) + std::string(table) + " header does not match the expected columns");
    }
    std::vector<Line> rows;
    for (++first; first != lines.end(); ++first) {
        if (!trim(first->text).empty()) rows.push_back(*first);
    }
    return rows;
}

BusType csv_bus_type(std::string_view cell, std::size_t line_no) {
    auto t = upper(trim(cell));
    if (t == "PQ" || t == "1") return BusType::PQ;
    if (t == "PV" || t == "2") return BusType::PV;
    if (t == "SLACK" || t == "REF" || t == "3") return BusType::Slack;
    throw PmuError(ErrorKind::MalformedRecord, where(line_no) + "unknown bus type '" + t + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PmuError(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string_view to_string(BusType type) {
    switch (type) {
        case BusType::PQ: return "PQ";
        case BusType::PV: return "PV";
        case BusType::Slack: return "SLACK";
    }
    return "PQ";
}

int PowerCase::slack_index() const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].type == BusType::Slack) return static_cast<int>(i);
    }
    return -1;
}

int PowerCase::index_of(int external_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].external_id == external_id) return static_cast<int>(i);
    }
    return -1;
}

bool is_connected(std::size_t bus_count, const std::vector<Branch>& branches) {
    if (bus_count == 0) return false;
    std::vector<std::vector<int>> adjacent(bus_count);
    for (const auto& b : branches) {
        adjacent[b.from_bus].push_back(b.to_bus);
        adjacent[b.to_bus].push_back(b.from_bus);
    }
    std::vector<bool> seen(bus_count, false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        for (int v : adjacent[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++reached;
                frontier.push(v);
            }
        }
    }
    return reached == bus_count;
}

void validate(const PowerCase& pc) {
    if (pc.buses.size() < 2) {
        throw PmuError(ErrorKind::InvalidBus, "case needs at least 2 buses, found " + std::to_string(pc.buses.size()));
    }
    if (pc.branches.empty()) throw PmuError(ErrorKind::InvalidBranch, "case has no branches");
    if (!(pc.mva_base > 0.0)) throw PmuError(ErrorKind::MalformedRecord, "mva_base must be positive");

    int slack_count = 0;
    for (const auto& bus : pc.buses) {
        if (bus.type == BusType::Slack) ++slack_count;
        if (bus.type != BusType::PQ && !(bus.v_mag > 0.0)) {
            throw PmuError(ErrorKind::InvalidBus,
                           "bus " + std::to_string(bus.external_id) + " regulates a non-positive voltage magnitude");
        }
    }
    if (slack_count == 0) throw PmuError(ErrorKind::MissingSlack, "case has no slack bus");
    if (slack_count > 1) {
        throw PmuError(ErrorKind::DuplicateSlack, "case has " + std::to_string(slack_count) + " slack buses");
    }

    const int n = static_cast<int>(pc.buses.size());
    for (std::size_t k = 0; k < pc.branches.size(); ++k) {
        const auto& b = pc.branches[k];
        std::string label = "branch " + std::to_string(k + 1);
        if (b.from_bus < 0 || b.from_bus >= n || b.to_bus < 0 || b.to_bus >= n) {
            throw PmuError(ErrorKind::UnknownBusReference, label + " references a bus outside the case");
        }
        label += " (" + std::to_string(pc.buses[b.from_bus].external_id) + "-" +
                 std::to_string(pc.buses[b.to_bus].external_id) + ")";
        if (b.from_bus == b.to_bus) throw PmuError(ErrorKind::InvalidBranch, label + " connects a bus to itself");
        if (b.r == 0.0 && b.x == 0.0) throw PmuError(ErrorKind::InvalidBranch, label + " has zero impedance");
        if (!(b.x > 0.0)) {
            throw PmuError(ErrorKind::InvalidBranch, label + " has non-positive series reactance");
        }
        if (!(b.tap_ratio > 0.0)) throw PmuError(ErrorKind::InvalidBranch, label + " has non-positive tap ratio");
    }
    if (!is_connected(pc.buses.size(), pc.branches)) {
        throw PmuError(ErrorKind::DisconnectedNetwork, "branch graph of case '" + pc.name + "' is not connected");
    }
}

PowerCase parse_cdf(std::string_view text) {
    auto lines = split_lines(text);
    if (lines.empty()) throw PmuError(ErrorKind::MissingSection, "empty case file");

    const auto& title = lines.front().text;
    double mva_base = 100.0;
    if (auto field = trim(columns(title, 32, 37)); !field.empty()) {
        mva_base = parse_double(field, 1, "MVA base");
    }
    std::string name(trim(columns(title, 46, 73)));
    if (name.empty()) name = std::string(trim(title));

    std::vector<Bus> buses;
    for (const auto& rec : section(lines, "BUS DATA FOLLOWS", "-999")) {
        const auto& l = rec.text;
        const auto n = rec.number;
        Bus bus;
        bus.external_id = parse_int(columns(l, 1, 4), n, "bus number");
        bus.type = cdf_bus_type(static_cast<int>(optional_column(l, 25, 26, n, "bus type")), n);
        double final_v = optional_column(l, 28, 33, n, "final voltage");
        double desired_v = optional_column(l, 85, 90, n, "desired voltage");
        bus.v_mag = (bus.type != BusType::PQ && desired_v > 0.0) ? desired_v : final_v;
        if (bus.type == BusType::PQ && !(bus.v_mag > 0.0)) bus.v_mag = 1.0;
        bus.v_ang = optional_column(l, 34, 40, n, "final angle") * kDegToRad;
        bus.p_load = optional_column(l, 41, 49, n, "load MW") / mva_base;
        bus.q_load = optional_column(l, 50, 59, n, "load MVAR") / mva_base;
        bus.p_gen = optional_column(l, 60, 67, n, "generation MW") / mva_base;
        bus.q_gen = optional_column(l, 68, 75, n, "generation MVAR") / mva_base;
        bus.shunt_g = optional_column(l, 107, 114, n, "shunt conductance");
        bus.shunt_b = optional_column(l, 115, 122, n, "shunt susceptance");
        buses.push_back(bus);
    }

    std::vector<RawBranch> raw;
    for (const auto& rec : section(lines, "BRANCH DATA FOLLOWS", "-999")) {
        const auto& l = rec.text;
        const auto n = rec.number;
        RawBranch rb{};
        rb.line_no = n;
        rb.from_id = parse_int(columns(l, 1, 4), n, "tap bus number");
        rb.to_id = parse_int(columns(l, 6, 9), n, "Z bus number");
        rb.branch.r = parse_double(columns(l, 20, 29), n, "branch resistance");
        rb.branch.x = parse_double(columns(l, 30, 40), n, "branch reactance");
        rb.branch.b_charging = optional_column(l, 41, 50, n, "line charging");
        double tap = optional_column(l, 77, 82, n, "turns ratio");
        rb.branch.tap_ratio = tap == 0.0 ? 1.0 : tap;
        rb.branch.phase_shift = optional_column(l, 84, 90, n, "phase shift") * kDegToRad;
        raw.push_back(rb);
    }
    return assemble(std::move(name), mva_base, std::move(buses), raw);
}

PowerCase parse_csv_fallback(const CsvCaseText& text) {
    std::string name = "unnamed";
    double mva_base = 100.0;
    for (const auto& line : split_lines(text.metadata)) {
        std::string_view rest = line.text;
        if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
        while (!trim(rest).empty()) {
            auto comma = rest.find(',');
            auto pair = rest.substr(0, comma);
            auto eq = pair.find('=');
            if (eq == std::string_view::npos) {
                throw PmuError(ErrorKind::MalformedRecord, where(line.number) + "expected key = value in metadata");
            }
            auto key = trim(pair.substr(0, eq));
            auto value = trim(pair.substr(eq + 1));
            if (key == "name") {
                if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
                    value = value.substr(1, value.size() - 2);
                }
                name = std::string(value);
            } else if (key == "mva_base") {
                mva_base = parse_double(value, line.number, "mva_base");
            }
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
    }

    std::vector<Bus> buses;
    const std::vector<std::string> bus_header{"id", "type", "vmag", "vang_deg", "pload", "qload",
                                              "pgen", "qgen", "gs", "bs"};
    for (const auto& row : csv_rows(text.buses, bus_header, "bus")) {
        auto c = split_csv(row.text);
        if (c.size() != bus_header.size()) {
            throw PmuError(ErrorKind::MalformedRecord, where(row.number) + "bus row has " + std::to_string(c.size()) +
                                                           " cells, expected " + std::to_string(bus_header.size()));
        }
        Bus bus;
        bus.external_id = parse_int(c[0], row.number, "id");
        bus.type = csv_bus_type(c[1], row.number);
        bus.v_mag = parse_double(c[2], row.number, "vmag");
        bus.v_ang = parse_double(c[3], row.number, "vang_deg") * kDegToRad;
        bus.p_load = parse_double(c[4], row.number, "pload");
        bus.q_load = parse_double(c[5], row.number, "qload");
        bus.p_gen = parse_double(c[6], row.number, "pgen");
        bus.q_gen = parse_double(c[7], row.number, "qgen");
        bus.shunt_g = parse_double(c[8], row.number, "gs");
        bus.shunt_b = parse_double(c[9], row.number, "bs");
        buses.push_back(bus);
    }

    std::vector<RawBranch> raw;
    const std::vector<std::string> branch_header{"from", "to", "r", "x", "b", "tap", "shift_deg"};
    for (const auto& row : csv_rows(text.branches, branch_header, "branch")) {
        auto c = split_csv(row.text);
        if (c.size() != branch_header.size()) {
            throw PmuError(ErrorKind::MalformedRecord, where(row.number) + "branch row has " +
                                                           std::to_string(c.size()) + " cells, expected " +
                                                           std::to_string(branch_header.size()));
        }
        RawBranch rb{};
        rb.line_no = row.number;
        rb.from_id = parse_int(c[0], row.number, "from");
        rb.to_id = parse_int(c[1], row.number, "to");
        rb.branch.r = parse_double(c[2], row.number, "r");
        rb.branch.x = parse_double(c[3], row.number, "x");
        rb.branch.b_charging = parse_double(c[4], row.number, "b");
        double tap = parse_double(c[5], row.number, "tap");
        rb.branch.tap_ratio = tap == 0.0 ? 1.0 : tap;
        rb.branch.phase_shift = parse_double(c[6], row.number, "shift_deg") * kDegToRad;
        raw.push_back(rb);
    }
    return assemble(std::move(name), mva_base, std::move(buses), raw);
}

CsvCaseText write_csv_fallback(const PowerCase& pc) {
    CsvCaseText out;
    out.metadata = "name = \"" + pc.name + "\"\nmva_base = " + format_double(pc.mva_base) + "\n";

    std::ostringstream buses;
    buses << "id,type,vmag,vang_deg,pload,qload,pgen,qgen,gs,bs\n";
    for (const auto& b : pc.buses) {
        buses << b.external_id << ',' << to_string(b.type) << ',' << format_double(b.v_mag) << ','
              << format_double(degrees_for(b.v_ang)) << ',' << format_double(b.p_load) << ','
              << format_double(b.q_load) << ',' << format_double(b.p_gen) << ',' << format_double(b.q_gen) << ','
              << format_double(b.shunt_g) << ',' << format_double(b.shunt_b) << '\n';
    }
    out.buses = buses.str();

    std::ostringstream branches;
    branches << "from,to,r,x,b,tap,shift_deg\n";
    for (const auto& br : pc.branches) {
        branches << pc.buses[br.from_bus].external_id << ',' << pc.buses[br.to_bus].external_id << ','
                 << format_double(br.r) << ',' << format_double(br.x) << ',' << format_double(br.b_charging) << ','
                 << format_double(br.tap_ratio) << ',' << format_double(degrees_for(br.phase_shift)) << '\n';
    }
    out.branches = branches.str();
    return out;
}

namespace {

std::filesystem::path csv_case_dir(const std::filesystem::path& p) {
    std::error_code ec;
    if (std::filesystem::is_directory(p, ec)) return p;
    auto file = p.filename().string();
    if (file == "case.toml" || file == "buses.csv" || file == "branches.csv") return p.parent_path();
    return {};
}

}  // namespace

PowerCase load_case(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    std::error_code ec;
    if (!fs::exists(p, ec)) throw PmuError(ErrorKind::Io, "case path does not exist: " + path);

    fs::path dir = csv_case_dir(p);
    if (dir.empty()) return parse_cdf(read_file(p));

    CsvCaseText text;
    if (fs::exists(dir / "case.toml")) text.metadata = read_file(dir / "case.toml");
    if (!fs::exists(dir / "buses.csv")) throw PmuError(ErrorKind::MissingSection, "missing bus table buses.csv");
    if (!fs::exists(dir / "branches.csv")) {
        throw PmuError(ErrorKind::MissingSection, "missing branch table branches.csv");
    }
    text.buses = read_file(dir / "buses.csv");
    text.branches = read_file(dir / "branches.csv");
    return parse_csv_fallback(text);
}

std::vector<std::string> case_source_files(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path dir = csv_case_dir(path);
    if (dir.empty()) return {path};
    std::vector<std::string> files;
    for (const char* name : {"case.toml", "buses.csv", "branches.csv"}) {
        if (fs::exists(dir / name)) files.push_back((dir / name).string());
    }
    return files;
}

}  // namespace pmu
