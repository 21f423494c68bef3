#include "verifact/corpus.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "verifact/error.hpp"

namespace verifact {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

std::shared_ptr<const TextStore> TextStore::map_file(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw NotFoundError("cannot open " + path.string());
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
        ::close(fd);
        throw Error("cannot stat " + path.string());
    }
    std::shared_ptr<TextStore> store(new TextStore());
    store->size_ = static_cast<std::size_t>(st.st_size);
    if (store->size_ > 0) {
        void* p = ::mmap(nullptr, store->size_, PROT_READ, MAP_PRIVATE, fd, 0);
        if (p == MAP_FAILED) {
            ::close(fd);
            throw Error("cannot map " + path.string());
        }
        ::madvise(p, store->size_, MADV_SEQUENTIAL);
        store->data_ = static_cast<const char*>(p);
        store->mapped_ = true;
    }
    ::close(fd);
    return store;
}

std::shared_ptr<const TextStore> TextStore::own(std::string text) {
    std::shared_ptr<TextStore> store(new TextStore());
    store->owned_ = std::move(text);
    store->data_ = store->owned_.data();
    store->size_ = store->owned_.size();
    return store;
}

TextStore::~TextStore() {
    if (mapped_) ::munmap(const_cast<char*>(data_), size_);
}

namespace {

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

// Calls f(line_number, line) for each non-empty line; strips a trailing '\r'.
template <typename F>
void for_each_line(std::string_view text, F&& f) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) f(line_no, line, pos);
        pos = end + 1;
    }
}

struct TsvRow {
    std::int64_t id;
    std::string_view text;
};

TsvRow split_tsv(const std::string& source, std::size_t line_no, std::string_view line) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(source, line_no, "missing tab separator");
    TsvRow row{};
    if (!parse_int(line.substr(0, tab), row.id))
        throw ParseError(source, line_no, "non-integer id '" + std::string(line.substr(0, tab)) + "'");
    row.text = line.substr(tab + 1);
    if (blank(row.text)) throw ParseError(source, line_no, "empty text");
    return row;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

void Corpus::finish_index(const std::vector<std::size_t>& line_numbers) {
    by_id_.resize(entries_.size());
    for (std::uint32_t i = 0; i < by_id_.size(); ++i) by_id_[i] = i;
    std::sort(by_id_.begin(), by_id_.end(),
              [&](std::uint32_t a, std::uint32_t b) { return entries_[a].id < entries_[b].id; });
    for (std::size_t i = 1; i < by_id_.size(); ++i) {
        const auto& prev = entries_[by_id_[i - 1]];
        const auto& cur = entries_[by_id_[i]];
        if (prev.id == cur.id) {
            std::size_t a = line_numbers[by_id_[i - 1]], b = line_numbers[by_id_[i]];
            throw DuplicateKeyError("duplicate passage id " + std::to_string(cur.id) + " on lines " +
                                    std::to_string(std::min(a, b)) + " and " + std::to_string(std::max(a, b)));
        }
    }
}

Corpus Corpus::from_pairs(const std::vector<std::pair<PassageId, std::string>>& passages,
                          TokenizerOptions tokenizer) {
    std::string blob;
    Corpus c;
    c.tokenizer_ = tokenizer;
    std::vector<std::size_t> line_numbers;
    for (const auto& [id, text] : passages) {
        if (blank(text)) throw ParseError("<memory>", line_numbers.size() + 1, "empty text");
        c.entries_.push_back({id, blob.size(), static_cast<std::uint32_t>(text.size())});
        line_numbers.push_back(line_numbers.size() + 1);
        blob += text;
    }
    c.store_ = TextStore::own(std::move(blob));
    c.finish_index(line_numbers);
    return c;
}

double Corpus::avg_doc_len() const {
    std::call_once(avg_->once, [this] {
        if (entries_.empty()) return;
        std::uint64_t total = 0;
        for_each([&](const Passage& p) {
            for_each_token(p.text, tokenizer_, [&](std::string_view) { ++total; });
        });
        avg_->value = static_cast<double>(total) / static_cast<double>(entries_.size());
    });
    return avg_->value;
}

Passage Corpus::at(std::size_t i) const {
    const Entry& e = entries_.at(i);
    return {e.id, store_->view().substr(e.offset, e.length)};
}

std::optional<Passage> Corpus::find(PassageId id) const {
    auto it = std::lower_bound(by_id_.begin(), by_id_.end(), id,
                               [&](std::uint32_t pos, PassageId v) { return entries_[pos].id < v; });
    if (it == by_id_.end() || entries_[*it].id != id) return std::nullopt;
    return at(*it);
}

Corpus load_collection(const std::filesystem::path& path, TokenizerOptions tokenizer) {
    if (!std::filesystem::exists(path)) throw NotFoundError("collection not found: " + path.string());
    Corpus c;
    c.tokenizer_ = tokenizer;
    c.store_ = TextStore::map_file(path);
    std::string source = path.string();
    std::vector<std::size_t> line_numbers;
    std::string_view text = c.store_->view();
    for_each_line(text, [&](std::size_t line_no, std::string_view line, std::size_t offset) {
        TsvRow row = split_tsv(source, line_no, line);
        std::size_t text_offset = offset + static_cast<std::size_t>(row.text.data() - line.data());
        c.entries_.push_back({row.id, text_offset, static_cast<std::uint32_t>(row.text.size())});
        line_numbers.push_back(line_no);
    });
    c.finish_index(line_numbers);
    return c;
}

std::vector<Question> load_queries(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::string source = path.string();
    std::vector<Question> out;
    std::unordered_set<QueryId> seen;
    for_each_line(text, [&](std::size_t line_no, std::string_view line, std::size_t) {
        TsvRow row = split_tsv(source, line_no, line);
        if (!seen.insert(row.id).second)
            throw DuplicateKeyError("duplicate query id " + std::to_string(row.id) + " on line " +
                                    std::to_string(line_no));
        out.push_back({row.id, std::string(row.text)});
    });
    return out;
}

void QrelSet::add(QueryId qid, PassageId pid) {
    auto& pids = judgments_[qid];
    if (std::find(pids.begin(), pids.end(), pid) == pids.end()) pids.push_back(pid);
}

const std::vector<PassageId>* QrelSet::find(QueryId qid) const {
    auto it = judgments_.find(qid);
    return it == judgments_.end() ? nullptr : &it->second;
}

void QrelSet::validate_against(const Corpus& corpus) const {
    for (const auto& [qid, pids] : judgments_)
        for (PassageId pid : pids)
            if (!corpus.contains(pid))
                throw NotFoundError("qrel for query " + std::to_string(qid) + " references unknown passage " +
                                    std::to_string(pid));
}

QrelSet load_qrels(const std::filesystem::path& path) {
    std::string text = read_file(path);
    std::string source = path.string();
    QrelSet qrels;
    for_each_line(text, [&](std::size_t line_no, std::string_view line, std::size_t) {
        std::vector<std::string_view> fields;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            std::size_t start = i;
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
            if (i > start) fields.push_back(line.substr(start, i - start));
        }
        if (fields.empty()) return;
        if (fields.size() != 4) throw ParseError(source, line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        std::int64_t qid = 0, iter = 0, pid = 0, rel = 0;
        if (!parse_int(fields[0], qid) || !parse_int(fields[1], iter) || !parse_int(fields[2], pid) ||
            !parse_int(fields[3], rel))
            throw ParseError(source, line_no, "non-integer field");
        if (rel > 0) qrels.add(qid, pid);
    });
    return qrels;
}

void write_collection(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    corpus.for_each([&](const Passage& p) { out << p.id << '\t' << p.text << '\n'; });
}

}  // namespace verifact
