#include "calib/io.hpp"

#include <fmt/format.h>
#include <fstream>
#include <sstream>

namespace calib {

namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
    throw InputError(fmt::format("{}:{}: {}", source, line, what));
}

double parse_number(const std::string& tok, const std::string& source, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(source, line, fmt::format("expected a number, got '{}'", tok));
    }
}

Axis parse_axis(const std::string& tok, const std::string& source, int line) {
    if (tok == "x") return Axis::X;
    if (tok == "y") return Axis::Y;
    if (tok == "z") return Axis::Z;
    fail(source, line, fmt::format("expected axis x|y|z, got '{}'", tok));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::string fmt_num(double v) { return fmt::format("{:.17g}", v); }

} // namespace

KinematicModel parse_model(std::istream& in, const std::string& source) {
    KinematicModel model;
    bool joints_seen = false;
    std::string raw;
    int lineno = 0;
    std::vector<std::tuple<int, ElementaryTransform, std::string>> pending; // line, transform, param-name
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        std::string t;
        while (ls >> t) tok.push_back(t);
        if (tok.empty()) continue;

        if (tok[0] == "joints") {
            if (tok.size() != 2) fail(source, lineno, "usage: joints <n>");
            model.n_joints = static_cast<int>(parse_number(tok[1], source, lineno));
            if (model.n_joints < 1) fail(source, lineno, "joint count must be positive");
            model.joint_limits.assign(model.n_joints, JointLimits{});
            joints_seen = true;
        } else if (tok[0] == "param") {
            if (tok.size() != 5)
                fail(source, lineno, "usage: param <name> <nominal> <m|rad> <identifiable|fixed>");
            if (model.parameter_index(tok[1]) >= 0)
                fail(source, lineno, fmt::format("duplicate parameter '{}'", tok[1]));
            if (tok[3] != "m" && tok[3] != "rad")
                fail(source, lineno, fmt::format("unit must be m or rad, got '{}'", tok[3]));
            if (tok[4] != "identifiable" && tok[4] != "fixed")
                fail(source, lineno, "flag must be identifiable or fixed");
            model.parameters.push_back(
                {tok[1], parse_number(tok[2], source, lineno), tok[3], tok[4] == "identifiable"});
        } else if (tok[0] == "joint_limit") {
            if (!joints_seen) fail(source, lineno, "joint_limit before joints line");
            if (tok.size() != 4) fail(source, lineno, "usage: joint_limit <index> <lo> <hi>");
            const int j = static_cast<int>(parse_number(tok[1], source, lineno));
            if (j < 0 || j >= model.n_joints) fail(source, lineno, "joint index out of range");
            const double lo = parse_number(tok[2], source, lineno);
            const double hi = parse_number(tok[3], source, lineno);
            if (!(lo < hi)) fail(source, lineno, "degenerate joint limits");
            model.joint_limits[j] = {lo, hi};
        } else if (tok[0] == "trans" || tok[0] == "rot") {
            if (!joints_seen) fail(source, lineno, "transform before joints line");
            if (tok.size() < 4) fail(source, lineno, "truncated transform line");
            ElementaryTransform tr;
            tr.kind = tok[0] == "trans" ? TransformKind::Translation : TransformKind::Rotation;
            tr.axis = parse_axis(tok[1], source, lineno);
            std::string offset_name;
            if (tok[2] == "const") {
                if (tok.size() != 4) fail(source, lineno, "usage: ... const <value>");
                tr.driver = DriverKind::Constant;
                tr.value = parse_number(tok[3], source, lineno);
            } else if (tok[2] == "joint") {
                if (tok.size() != 4 && !(tok.size() == 6 && tok[4] == "offset"))
                    fail(source, lineno, "usage: ... joint <index> [offset <param-name>]");
                tr.driver = DriverKind::Joint;
                tr.joint = static_cast<int>(parse_number(tok[3], source, lineno));
                if (tok.size() == 6) offset_name = tok[5];
            } else if (tok[2] == "param") {
                if (tok.size() != 4) fail(source, lineno, "usage: ... param <param-name>");
                tr.driver = DriverKind::Parameter;
                offset_name = tok[3];
            } else {
                fail(source, lineno, fmt::format("unknown driver '{}'", tok[2]));
            }
            pending.emplace_back(lineno, tr, offset_name);
        } else {
            fail(source, lineno, fmt::format("unknown directive '{}'", tok[0]));
        }
    }
    if (!joints_seen) throw InputError(fmt::format("{}: missing joints line", source));

    for (auto& [line, tr, name] : pending) {
        if (!name.empty()) {
            const int p = model.parameter_index(name);
            if (p < 0) fail(source, line, fmt::format("unknown parameter '{}'", name));
            if (tr.driver == DriverKind::Parameter)
                tr.param = p;
            else
                tr.offset_param = p;
        }
        model.chain.push_back(tr);
    }
    try {
        model.validate();
    } catch (const InputError& e) {
        throw InputError(fmt::format("{}: {}", source, e.what()));
    }
    return model;
}

KinematicModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open model file '{}'", path));
    return parse_model(in, path);
}

std::string serialize_model(const KinematicModel& model) {
    std::string out;
    out += fmt::format("joints {}\n", model.n_joints);
    for (const auto& p : model.parameters)
        out += fmt::format("param {} {} {} {}\n", p.name, fmt_num(p.nominal), p.unit,
                           p.identifiable ? "identifiable" : "fixed");
    for (int j = 0; j < model.n_joints; ++j)
        out += fmt::format("joint_limit {} {} {}\n", j, fmt_num(model.joint_limits[j].lo),
                           fmt_num(model.joint_limits[j].hi));
    for (const auto& t : model.chain) {
        out += t.kind == TransformKind::Translation ? "trans " : "rot ";
        out += t.axis == Axis::X ? "x" : (t.axis == Axis::Y ? "y" : "z");
        switch (t.driver) {
        case DriverKind::Constant:
            out += fmt::format(" const {}", fmt_num(t.value));
            break;
        case DriverKind::Joint:
            out += fmt::format(" joint {}", t.joint);
            if (t.offset_param >= 0)
                out += fmt::format(" offset {}", model.parameters[t.offset_param].name);
            break;
        case DriverKind::Parameter:
            out += fmt::format(" param {}", model.parameters[t.param].name);
            break;
        }
        out += "\n";
    }
    return out;
}

void save_model(const KinematicModel& model, const std::string& path) {
    write_file(path, serialize_model(model));
}

Plan parse_plan_csv(std::istream& in, int n_joints, const std::string& source) {
    Plan plan;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw InputError(fmt::format("{}: empty plan file", source));
    ++lineno;
    const auto header = split_csv(line);
    if (static_cast<int>(header.size()) != n_joints + 1 || header.back() != "multiplicity")
        fail(source, lineno,
             fmt::format("expected header q_1,...,q_{},multiplicity", n_joints));
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != n_joints + 1)
            fail(source, lineno, fmt::format("expected {} fields, got {}", n_joints + 1,
                                             fields.size()));
        PlanEntry e;
        e.q.resize(n_joints);
        for (int j = 0; j < n_joints; ++j) e.q[j] = parse_number(fields[j], source, lineno);
        e.multiplicity = static_cast<int>(parse_number(fields[n_joints], source, lineno));
        if (e.multiplicity < 1) fail(source, lineno, "multiplicity must be >= 1");
        plan.entries.push_back(std::move(e));
    }
    if (plan.entries.empty()) throw InputError(fmt::format("{}: plan has no entries", source));
    return plan;
}

Plan load_plan_csv(const std::string& path, int n_joints) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open plan file '{}'", path));
    return parse_plan_csv(in, n_joints, path);
}

std::string serialize_plan_csv(const Plan& plan) {
    if (plan.entries.empty()) throw InputError("cannot serialize an empty plan");
    const int n = static_cast<int>(plan.entries.front().q.size());
    std::string out;
    for (int j = 0; j < n; ++j) out += fmt::format("q_{},", j + 1);
    out += "multiplicity\n";
    for (const auto& e : plan.entries) {
        for (int j = 0; j < n; ++j) out += fmt_num(e.q[j]) + ",";
        out += fmt::format("{}\n", e.multiplicity);
    }
    return out;
}

void save_plan_csv(const Plan& plan, const std::string& path) {
    write_file(path, serialize_plan_csv(plan));
}

MeasurementSet parse_measurements_csv(std::istream& in, int n_joints, const std::string& source) {
    MeasurementSet data;
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line))
        throw InputError(fmt::format("{}: empty measurement file", source));
    ++lineno;
    const auto header = split_csv(line);
    if (static_cast<int>(header.size()) != n_joints + 3 || header.back() != "p_z")
        fail(source, lineno,
             fmt::format("expected header q_1,...,q_{},p_x,p_y,p_z", n_joints));
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (static_cast<int>(fields.size()) != n_joints + 3)
            fail(source, lineno,
                 fmt::format("expected {} fields, got {}", n_joints + 3, fields.size()));
        MeasurementRecord r;
        r.q.resize(n_joints);
        for (int j = 0; j < n_joints; ++j) r.q[j] = parse_number(fields[j], source, lineno);
        for (int a = 0; a < 3; ++a) r.p[a] = parse_number(fields[n_joints + a], source, lineno);
        data.records.push_back(std::move(r));
    }
    if (data.records.empty())
        throw InputError(fmt::format("{}: measurement file has no records", source));
    return data;
}

MeasurementSet load_measurements_csv(const std::string& path, int n_joints) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open measurement file '{}'", path));
    return parse_measurements_csv(in, n_joints, path);
}

std::string serialize_measurements_csv(const MeasurementSet& data) {
    if (data.records.empty()) throw InputError("cannot serialize an empty measurement set");
    const int n = static_cast<int>(data.records.front().q.size());
    std::string out;
    for (int j = 0; j < n; ++j) out += fmt::format("q_{},", j + 1);
    out += "p_x,p_y,p_z\n";
    for (const auto& r : data.records) {
        for (int j = 0; j < n; ++j) out += fmt_num(r.q[j]) + ",";
        out += fmt_num(r.p[0]) + "," + fmt_num(r.p[1]) + "," + fmt_num(r.p[2]) + "\n";
    }
    return out;
}

void save_measurements_csv(const MeasurementSet& data, const std::string& path) {
    write_file(path, serialize_measurements_csv(data));
}

std::string serialize_campaign_csv(const std::vector<double>& errors,
                                   const CampaignStats& stats, std::uint64_t seed) {
    std::string out = "trial,error_m\n";
    for (size_t i = 0; i < errors.size(); ++i)
        out += fmt::format("{},{}\n", i, fmt_num(errors[i]));
    out += "# summary\n";
    out += fmt::format("# seed {}\n", seed);
    out += fmt::format("# n_trials {}\n", stats.n_trials);
    out += fmt::format("# n_failed {}\n", stats.n_failed);
    out += fmt::format("# mean_m {}\n", fmt_num(stats.mean_error));
    out += fmt::format("# std_m {}\n", fmt_num(stats.std_error));
    out += fmt::format("# rms_m {}\n", fmt_num(stats.rms_error));
    out += fmt::format("# p5_m {}\n", fmt_num(stats.p5));
    out += fmt::format("# p50_m {}\n", fmt_num(stats.p50));
    out += fmt::format("# p95_m {}\n", fmt_num(stats.p95));
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot open '{}' for writing", path));
    out << content;
    if (!out) throw InputError(fmt::format("write failed for '{}'", path));
}

} // namespace calib
