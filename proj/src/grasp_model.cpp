#include "dexgrasp/grasp_model.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dexgrasp/affinity.hpp"
#include "dexgrasp/errors.hpp"

namespace dexgrasp {

namespace fs = std::filesystem;
using nlohmann::json;

GraspModel learn_grasp_model(const DemoGrasp& demo, const KinematicHand& hand,
                             const LearnParams& params) {
    GraspModel model;
    model.grasp_type = demo.grasp_type;

    const std::vector<Pose> links = hand.forward_kinematics(demo.final_wrist, demo.final_config);
    for (int link = 0; link < hand.num_links(); ++link) {
        try {
            model.contacts.push_back(learn_contact_model(demo.features, links[link], link,
                                                         hand.link_geometry(link), params.lambda,
                                                         params.delta, params.bandwidth));
        } catch (const NoContact&) {
            // Link not in contact; skip.
        }
    }
    if (model.contacts.empty())
        throw NoContact("learn_grasp_model: no link is in contact with the object");

    model.hand_config = learn_hand_config_model(demo.joint_trajectory, params.alpha, params.beta,
                                                params.sigma_hc, params.gamma_grid);
    return model;
}

std::vector<ContactModelCluster> cluster_contact_models(const std::vector<ContactModel>& models,
                                                        const ClusterOptions& options, Rng& rng,
                                                        ClusterReport* report) {
    if (models.size() < 2)
        throw std::invalid_argument("cluster_contact_models: need at least 2 models");
    const int n = static_cast<int>(models.size());

    MatX sim(n, n);
    for (int i = 0; i < n; ++i) {
        sim(i, i) = 0;
        for (int j = i + 1; j < n; ++j) {
            const double d = contact_model_distance(models[i], models[j], options.distance_samples);
            sim(i, j) = -d;
            sim(j, i) = -d;
        }
    }
    const double pref = options.preference ? *options.preference : median_off_diagonal(sim);
    const AffinityResult ap =
        affinity_propagation(sim, pref, options.damping, options.max_iterations);
    if (report) {
        report->converged = ap.converged;
        report->iterations = ap.iterations;
    }

    std::vector<ContactModelCluster> clusters(ap.exemplars.size());
    for (size_t c = 0; c < ap.exemplars.size(); ++c) clusters[c].exemplar_id = ap.exemplars[c];
    for (int i = 0; i < n; ++i) clusters[ap.assignment[i]].member_ids.push_back(i);

    for (ContactModelCluster& cluster : clusters) {
        // Union of member kernels; each member contributes equal total mass.
        std::vector<Kde::Kernel> merged;
        for (int id : cluster.member_ids) {
            for (Kde::Kernel k : models[id].kde.kernels()) {
                k.weight /= static_cast<double>(cluster.member_ids.size());
                merged.push_back(k);
            }
        }
        const ContactModel& exemplar = models[cluster.exemplar_id];
        Kde merged_kde(std::move(merged), exemplar.kde.bandwidth());
        cluster.prototype.link_id = exemplar.link_id;
        cluster.prototype.lambda = exemplar.lambda;
        cluster.prototype.delta = exemplar.delta;
        cluster.prototype.kde = merged_kde.size() > options.prototype_budget
                                    ? merged_kde.condense(options.prototype_budget, rng)
                                    : merged_kde;
    }
    return clusters;
}

void save_grasp_model(const GraspModel& model, const std::string& dir) {
    fs::create_directories(dir);
    json manifest;
    manifest["grasp_type"] = model.grasp_type;
    manifest["view_id"] = model.view_id;
    json contacts = json::array();
    for (size_t i = 0; i < model.contacts.size(); ++i) {
        const ContactModel& c = model.contacts[i];
        json entry;
        entry["link_id"] = c.link_id;
        entry["lambda"] = c.lambda;
        entry["delta"] = c.delta;
        entry["kde_file"] = "contact_" + std::to_string(i) + ".kde";
        entry["distances"] = c.distances;
        entry["raw_weights"] = c.raw_weights;
        contacts.push_back(entry);
        c.kde.save_file(dir + "/contact_" + std::to_string(i) + ".kde");
    }
    manifest["contacts"] = contacts;

    const HandConfigModel& hc = model.hand_config;
    json hand;
    hand["start"] = std::vector<double>(hc.start_config().data(),
                                        hc.start_config().data() + hc.start_config().size());
    hand["grip"] = std::vector<double>(hc.grip_config().data(),
                                       hc.grip_config().data() + hc.grip_config().size());
    hand["alpha"] = hc.alpha();
    hand["beta"] = hc.beta();
    hand["sigma"] = hc.sigma();
    hand["gamma_grid"] = hc.gammas().size();
    manifest["hand_config"] = hand;

    std::ofstream os(dir + "/manifest.json");
    if (!os) throw IoError("save_grasp_model: cannot write manifest in " + dir);
    os << manifest.dump(2) << "\n";
}

GraspModel load_grasp_model(const std::string& dir) {
    std::ifstream is(dir + "/manifest.json");
    if (!is) throw IoError("load_grasp_model: cannot open manifest in " + dir);
    json manifest = json::parse(is);

    GraspModel model;
    model.grasp_type = manifest.at("grasp_type");
    model.view_id = manifest.at("view_id");
    for (const json& entry : manifest.at("contacts")) {
        ContactModel c;
        c.link_id = entry.at("link_id");
        c.lambda = entry.at("lambda");
        c.delta = entry.at("delta");
        c.kde = Kde::load_file(dir + "/" + entry.at("kde_file").get<std::string>());
        c.distances = entry.at("distances").get<std::vector<double>>();
        c.raw_weights = entry.at("raw_weights").get<std::vector<double>>();
        model.contacts.push_back(std::move(c));
    }

    const json& hand = manifest.at("hand_config");
    const auto start_v = hand.at("start").get<std::vector<double>>();
    const auto grip_v = hand.at("grip").get<std::vector<double>>();
    VecX start = Eigen::Map<const VecX>(start_v.data(), start_v.size());
    VecX grip = Eigen::Map<const VecX>(grip_v.data(), grip_v.size());
    model.hand_config = HandConfigModel(start, grip, hand.at("alpha"), hand.at("beta"),
                                        hand.at("sigma"), hand.at("gamma_grid"));
    return model;
}

}  // namespace dexgrasp
