#include "defect_reasoner/dataset.hpp"

#include "defect_reasoner/errors.hpp"
#include "defect_reasoner/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace defect_reasoner {

using nlohmann::json;

std::size_t DefectDataset::total_true_defects() const {
    std::size_t total = 0;
    for (const auto& entry : entries) {
        total += entry.truths.size();
    }
    return total;
}

namespace {

Polygon polygon_from_json(const json& arr) {
    if (!arr.is_array() || arr.size() < 3) {
        throw IngestError("polygon must be an array of at least 3 [x,y] pairs");
    }
    Polygon poly;
    poly.vertices.reserve(arr.size());
    for (const auto& pt : arr) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
            throw IngestError("polygon vertex must be a [x,y] number pair");
        }
        poly.vertices.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return normalize_polygon(poly);
}

json polygon_to_json(const Polygon& poly) {
    json arr = json::array();
    for (const Point& p : poly.vertices) {
        arr.push_back(json::array({p.x, p.y}));
    }
    return arr;
}

AnnotationFile parse_impl(const json& root, bool allow_confidence) {
    if (!root.is_object() || !root.contains("categories") || !root.contains("images")) {
        throw IngestError("annotation file must contain 'categories' and 'images'");
    }
    AnnotationFile out;
    for (const auto& cat : root.at("categories")) {
        if (!cat.is_string()) {
            throw IngestError("category names must be strings");
        }
        out.categories.push_back(cat.get<std::string>());
    }
    if (out.categories.empty()) {
        throw IngestError("category list is empty");
    }
    std::set<std::string> seen_categories(out.categories.begin(), out.categories.end());
    if (seen_categories.size() != out.categories.size()) {
        throw IngestError("duplicate category name");
    }
    std::map<std::string, int> category_index;
    for (std::size_t k = 0; k < out.categories.size(); ++k) {
        category_index[out.categories[k]] = static_cast<int>(k);
    }

    std::set<std::string> seen_ids;
    for (const auto& img : root.at("images")) {
        if (!img.is_object() || !img.contains("id") || !img.contains("defects")) {
            throw IngestError("image entry must contain 'id' and 'defects'");
        }
        ImageAnnotations anns;
        anns.id = img.at("id").get<std::string>();
        if (img.contains("file")) {
            anns.file = img.at("file").get<std::string>();
        }
        if (!seen_ids.insert(anns.id).second) {
            throw IngestError("duplicate image id: " + anns.id);
        }
        for (const auto& defect : img.at("defects")) {
            if (!defect.is_object() || !defect.contains("polygon") || !defect.contains("label")) {
                throw IngestError("defect entry must contain 'polygon' and 'label'");
            }
            AnnotationRecord rec;
            rec.polygon = polygon_from_json(defect.at("polygon"));
            const std::string label = defect.at("label").get<std::string>();
            auto it = category_index.find(label);
            if (it == category_index.end()) {
                throw IngestError("unknown category name: " + label);
            }
            rec.label = it->second;
            if (defect.contains("confidence")) {
                if (!allow_confidence) {
                    throw IngestError("'confidence' is only valid in prediction files");
                }
                if (!defect.at("confidence").is_number()) {
                    throw IngestError("confidence must be a number");
                }
                const double c = defect.at("confidence").get<double>();
                if (c < 0.0 || c > 1.0) {
                    throw IngestError("confidence out of range [0,1]: " + format_double(c));
                }
                rec.confidence = c;
            }
            anns.defects.push_back(std::move(rec));
        }
        out.images.push_back(std::move(anns));
    }
    return out;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open file: " + path.string());
    }
    json root;
    try {
        in >> root;
    } catch (const json::exception& e) {
        throw IngestError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return root;
}

} // namespace

AnnotationFile parse_annotations_text(const std::string& text, bool allow_confidence) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw IngestError(std::string("invalid JSON: ") + e.what());
    }
    return parse_impl(root, allow_confidence);
}

AnnotationFile parse_annotations(const std::filesystem::path& path) {
    return parse_impl(load_json_file(path), /*allow_confidence=*/false);
}

AnnotationFile parse_predictions(const std::filesystem::path& path) {
    return parse_impl(load_json_file(path), /*allow_confidence=*/true);
}

std::string serialize_annotations(const AnnotationFile& file, bool with_confidence) {
    json root;
    root["categories"] = file.categories;
    json images = json::array();
    for (const auto& img : file.images) {
        json entry;
        entry["id"] = img.id;
        entry["file"] = img.file;
        json defects = json::array();
        for (const auto& rec : img.defects) {
            json d;
            d["polygon"] = polygon_to_json(rec.polygon);
            d["label"] = file.categories.at(static_cast<std::size_t>(rec.label));
            if (with_confidence && rec.confidence.has_value()) {
                d["confidence"] = *rec.confidence;
            }
            defects.push_back(std::move(d));
        }
        entry["defects"] = std::move(defects);
        images.push_back(std::move(entry));
    }
    root["images"] = std::move(images);
    return root.dump(2) + "\n";
}

namespace {

// Paints every ground-truth region into a per-image ownership buffer;
// painting a pixel twice means two regions overlap.
void check_disjoint(const DatasetEntry& entry) {
    std::vector<std::uint8_t> owned(
        static_cast<std::size_t>(entry.image.width) * entry.image.height, 0);
    for (std::size_t d = 0; d < entry.truths.size(); ++d) {
        const auto pixels =
            rasterize_polygon(entry.truths[d].region, entry.image.width, entry.image.height);
        for (const PixelCoord& p : pixels) {
            std::uint8_t& cell = owned[static_cast<std::size_t>(p.y) * entry.image.width + p.x];
            if (cell) {
                throw IngestError("overlapping ground-truth regions in image '" + entry.id + "'");
            }
            cell = 1;
        }
    }
}

} // namespace

DefectDataset assemble_dataset(std::vector<NamedImage> images,
                               const AnnotationFile& truths,
                               const AnnotationFile& predictions) {
    std::map<std::string, RasterImage*> image_by_id;
    for (auto& named : images) {
        if (!image_by_id.emplace(named.id, &named.image).second) {
            throw IngestError("duplicate image id: " + named.id);
        }
    }
    if (image_by_id.size() != truths.images.size()) {
        throw IngestError("image set and annotation file disagree on image count");
    }

    std::map<std::string, const ImageAnnotations*> preds_by_id;
    std::set<std::string> truth_ids;
    for (const auto& img : truths.images) {
        truth_ids.insert(img.id);
    }
    for (const auto& img : predictions.images) {
        if (!truth_ids.count(img.id)) {
            throw IngestError("prediction references unknown image id: " + img.id);
        }
        preds_by_id[img.id] = &img;
    }
    if (truths.categories != predictions.categories) {
        throw IngestError("annotation and prediction files declare different categories");
    }

    DefectDataset dataset;
    dataset.categories = truths.categories;
    dataset.entries.reserve(truths.images.size());
    for (const auto& img : truths.images) {
        auto it = image_by_id.find(img.id);
        if (it == image_by_id.end()) {
            throw IngestError("annotation references unknown image id: " + img.id);
        }
        DatasetEntry entry;
        entry.id = img.id;
        entry.image = std::move(*it->second);
        const double w = entry.image.width;
        const double h = entry.image.height;
        for (const auto& rec : img.defects) {
            entry.truths.push_back({clamp_polygon(rec.polygon, w, h), rec.label});
        }
        if (auto pit = preds_by_id.find(img.id); pit != preds_by_id.end()) {
            for (const auto& rec : pit->second->defects) {
                entry.predictions.push_back(
                    {clamp_polygon(rec.polygon, w, h), rec.label, rec.confidence});
            }
        }
        check_disjoint(entry);
        dataset.entries.push_back(std::move(entry));
    }
    return dataset;
}

} // namespace defect_reasoner
