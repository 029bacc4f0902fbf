#include "cbx/session.hpp"

#include "cbx/error.hpp"
#include "cbx/ingest.hpp"

namespace cbx {

namespace {

constexpr const char* kFormat = "cbx-session";
constexpr int kVersion = 1;

[[noreturn]] void bad_document(const std::string& message) {
    throw Error(ErrorCode::InvalidArgument, "session document: " + message);
}

const Json& member(const Json& node, const char* key) {
    auto it = node.find(key);
    if (it == node.end()) bad_document(std::string("missing field '") + key + "'");
    return *it;
}

std::string stratify_name(const Stratification& s) {
    switch (s.by) {
        case Stratification::By::None: return "none";
        case Stratification::By::Class: return "class";
        case Stratification::By::Feature: return "feature:" + s.feature;
    }
    return "none";
}

Json sample_to_json(const StoredSample& sample, const Dataset& dataset) {
    Json j{{"id", sample.id}};
    if (sample.partition) {
        const auto& p = *sample.partition;
        Json a = Json::array();
        p.a.for_each([&](std::uint32_t i) { a.push_back(dataset.instance(i).id); });
        j["kind"] = "partition";
        j["seed"] = p.seed;
        j["fraction"] = p.fraction;
        j["stratify"] = stratify_name(p.stratify);
        j["a"] = std::move(a);
        j["warnings"] = p.warnings;
    } else {
        const auto& b = *sample.bootstrap;
        Json mult = Json::object();
        for (std::size_t i = 0; i < b.multiplicity.size(); ++i)
            if (b.multiplicity[i] != 0) mult[dataset.instance(i).id] = b.multiplicity[i];
        j["kind"] = "bootstrap";
        j["seed"] = b.seed;
        j["multiplicity"] = std::move(mult);
    }
    j["selections"] = sample.selections;
    return j;
}

} // namespace

Stratification parse_stratification(const std::string& text) {
    if (text.empty() || text == "none") return {};
    if (text == "class") return {Stratification::By::Class, {}};
    if (text.rfind("feature:", 0) == 0 && text.size() > 8) return {Stratification::By::Feature, text.substr(8)};
    throw Error(ErrorCode::InvalidArgument, "stratify must be 'none', 'class' or 'feature:<name>'", text);
}

StoredSample sample_from_json(const Json& node, const Dataset& dataset) {
    StoredSample sample;
    sample.id = member(node, "id").get<std::string>();
    const auto kind = member(node, "kind").get<std::string>();
    const auto seed = member(node, "seed").get<std::uint64_t>();
    if (kind == "partition") {
        PartitionResult p;
        p.seed = seed;
        p.fraction = node.value("fraction", 0.0);
        p.stratify = parse_stratification(node.value("stratify", std::string("none")));
        p.a = MemberSet(dataset.size());
        for (const auto& id : member(node, "a")) p.a.insert(dataset.require_index(id.get<std::string>()));
        p.b = p.a.complement();
        if (auto w = node.find("warnings"); w != node.end()) p.warnings = w->get<std::vector<std::string>>();
        sample.partition = std::move(p);
    } else if (kind == "bootstrap") {
        BootstrapResult b;
        b.seed = seed;
        b.multiplicity.assign(dataset.size(), 0);
        for (const auto& [id, count] : member(node, "multiplicity").items())
            b.multiplicity[dataset.require_index(id)] = count.get<std::uint32_t>();
        sample.bootstrap = std::move(b);
    } else {
        bad_document("unknown sample kind '" + kind + "'");
    }
    if (auto s = node.find("selections"); s != node.end()) sample.selections = s->get<std::vector<std::string>>();
    return sample;
}

Session::Session(std::string id, Dataset data) : dataset(std::move(data)), id_(std::move(id)) {}

Json Session::export_document() const {
    Json doc;
    doc["format"] = kFormat;
    doc["version"] = kVersion;
    doc["session"] = id_;
    doc["dataset"] = Json::parse(serialize_dataset(dataset));

    Json points = Json::array();
    for (const auto& [name, entry] : this->points.entries())
        points.push_back({{"classifier", name},
                          {"lower", entry.point.lower},
                          {"upper", entry.point.upper},
                          {"version", entry.version}});
    doc["operating_points"] = std::move(points);

    Json sels = Json::array();
    for (const auto* s : selections.list())
        sels.push_back({{"id", s->id},
                        {"name", s->name},
                        {"expr", to_json(s->expr)},
                        {"weight", s->weight},
                        {"slot", slot_name(s->slot)},
                        {"size", s->members.count()}});
    doc["selections"] = std::move(sels);
    doc["next_selection_id"] = selections.next_id();

    Json samples_json = Json::array();
    for (const auto& [id, sample] : samples) samples_json.push_back(sample_to_json(sample, dataset));
    doc["samples"] = std::move(samples_json);
    doc["next_sample_id"] = next_sample_id;

    doc["focus"] = {{"id", focus.item ? Json(dataset.instance(*focus.item).id) : Json(nullptr)},
                    {"random_calls", focus.random_calls}};
    doc["visible_selection"] = visible_selection ? Json(*visible_selection) : Json(nullptr);
    return doc;
}

std::unique_ptr<Session> Session::import_document(std::string id, const Json& doc) {
    if (!doc.is_object()) bad_document("must be an object");
    if (doc.value("format", std::string()) != kFormat) bad_document("format must be 'cbx-session'");
    if (doc.value("version", 0) != kVersion) bad_document("unsupported version");

    auto loaded = load_dataset(member(doc, "dataset").dump(), IngestFormat::Json);
    if (!loaded.report.ok()) {
        const auto& first = loaded.report.errors.front();
        throw Error(ErrorCode::ValidationFailed, "embedded dataset failed validation: " + first.message, first.code);
    }
    auto session = std::make_unique<Session>(std::move(id), std::move(*loaded.dataset));
    auto& s = *session;

    try {
        for (const auto& p : member(doc, "operating_points")) {
            const auto name = member(p, "classifier").get<std::string>();
            const auto& clf = s.dataset.classifier(name);
            if (clf.kind == ClassifierKind::Derived)
                throw Error(ErrorCode::FrozenClassifier, "derived classifier '" + name + "' has a frozen point", name);
            s.points.restore(name, {OperatingPoint::make(member(p, "lower").get<double>(), member(p, "upper").get<double>()),
                                    member(p, "version").get<std::uint64_t>()});
        }
        for (const auto& sel : member(doc, "selections")) {
            const auto slot_text = sel.value("slot", std::string("none"));
            const auto slot = parse_slot(slot_text);
            if (!slot) bad_document("unknown slot '" + slot_text + "'");
            s.selections.restore(member(sel, "id").get<std::string>(), sel.value("name", std::string()),
                                 expr_from_json(member(sel, "expr")), sel.value("weight", 1.0), *slot, s.dataset,
                                 s.points);
        }
        s.selections.set_next_id(doc.value("next_selection_id", s.selections.next_id()));

        for (const auto& node : member(doc, "samples")) {
            auto sample = sample_from_json(node, s.dataset);
            for (const auto& sel : sample.selections)
                if (!s.selections.find(sel)) bad_document("sample '" + sample.id + "' refers to unknown selection '" + sel + "'");
            auto key = sample.id;
            s.samples.emplace(std::move(key), std::move(sample));
        }
        s.next_sample_id = doc.value("next_sample_id", std::uint64_t{1});

        if (auto f = doc.find("focus"); f != doc.end() && f->is_object()) {
            if (auto item = f->find("id"); item != f->end() && item->is_string())
                s.focus.item = static_cast<std::uint32_t>(s.dataset.require_index(item->get<std::string>()));
            s.focus.random_calls = f->value("random_calls", std::uint64_t{0});
        }
        if (auto v = doc.find("visible_selection"); v != doc.end() && v->is_string()) {
            if (!s.selections.find(v->get<std::string>()))
                bad_document("visible selection '" + v->get<std::string>() + "' does not exist");
            s.visible_selection = v->get<std::string>();
        }
    } catch (const Json::exception& e) {
        bad_document(e.what());
    }
    return session;
}

std::string SessionStore::next_id() {
    std::lock_guard lock(mutex_);
    return "session-" + std::to_string(counter_++);
}

std::shared_ptr<Session> SessionStore::create(Dataset dataset, std::optional<std::string> id) {
    auto session = std::make_unique<Session>(id ? *id : next_id(), std::move(dataset));
    return adopt(std::move(session));
}

std::shared_ptr<Session> SessionStore::adopt(std::unique_ptr<Session> session) {
    std::shared_ptr<Session> shared(std::move(session));
    std::lock_guard lock(mutex_);
    auto [it, inserted] = sessions_.emplace(shared->id(), shared);
    if (!inserted) throw Error(ErrorCode::Conflict, "session '" + shared->id() + "' already exists", shared->id());
    return shared;
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::SessionNotFound, "unknown session '" + id + "'", id);
    return it->second;
}

bool SessionStore::remove(const std::string& id) {
    std::lock_guard lock(mutex_);
    return sessions_.erase(id) != 0;
}

} // namespace cbx
