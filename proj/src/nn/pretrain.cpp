#include "tpp/error.hpp"
#include "tpp/nn.hpp"

namespace tpp {

double contrastive_objective(const SgcBackbone& backbone, const ProjectionHead& head, const Graph& corrupted,
                             const Graph& original, double temperature, ContrastiveGradients* grads) {
  const SgcActivations tape_c = sgc_forward_tape(backbone, corrupted, corrupted.features());
  const SgcActivations tape_o = sgc_forward_tape(backbone, original, original.features());
  const ProjectionActivations proj_c = projection_forward(head, tape_c.output);
  const ProjectionActivations proj_o = projection_forward(head, tape_o.output);
  const NtXentResult nt = ntxent_loss(proj_c.output, proj_o.output, temperature);
  if (grads == nullptr) return nt.loss;

  const ProjectionGradients pg_c = projection_backward(head, tape_c.output, proj_c, nt.grad_view1);
  const ProjectionGradients pg_o = projection_backward(head, tape_o.output, proj_o, nt.grad_view2);
  const SgcGradients sg_c = sgc_backward(backbone, corrupted, tape_c, pg_c.input, true, false);
  const SgcGradients sg_o = sgc_backward(backbone, original, tape_o, pg_o.input, true, false);

  grads->w1 = sg_c.w1 + sg_o.w1;
  grads->w2 = sg_c.w2 + sg_o.w2;
  grads->head.w1 = pg_c.params.w1 + pg_o.params.w1;
  grads->head.b1 = pg_c.params.b1 + pg_o.params.b1;
  grads->head.w2 = pg_c.params.w2 + pg_o.params.w2;
  grads->head.b2 = pg_c.params.b2 + pg_o.params.b2;
  return nt.loss;
}

PretrainResult pretrain_backbone(const Graph& g1, const AugmentationParams& aug, const TrainConfig& cfg,
                                 const PretrainOptions& options) {
  cfg.validate();
  aug.validate();
  const std::uint64_t head_seed = derive_seed(cfg.rng_seed, seed_tag::kPretrain);
  PretrainResult result;
  result.backbone = SgcBackbone::init(g1.num_features(), options.hidden_dim, options.steps_per_layer, cfg.rng_seed);
  ProjectionHead head = ProjectionHead::init(options.hidden_dim, head_seed);

  AdamState s_w1, s_w2, s_hw1, s_hb1, s_hw2, s_hb2;
  ContrastiveGradients grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    AugmentationParams view = aug;
    if (options.fresh_views_per_epoch) view.rng_seed = derive_seed(aug.rng_seed, static_cast<std::uint64_t>(epoch));
    const Graph corrupted = augment_contrastive(g1, view);
    const double loss = contrastive_objective(result.backbone, head, corrupted, g1, cfg.temperature, &grads);
    result.epoch_losses.push_back(loss);

    adam_step(result.backbone.mutable_w1(), grads.w1, s_w1, cfg);
    adam_step(result.backbone.mutable_w2(), grads.w2, s_w2, cfg);
    adam_step(head.w1, grads.head.w1, s_hw1, cfg);
    adam_step(head.b1, grads.head.b1, s_hb1, cfg);
    adam_step(head.w2, grads.head.w2, s_hw2, cfg);
    adam_step(head.b2, grads.head.b2, s_hb2, cfg);
  }
  result.backbone.freeze();
  return result;
}

}  // namespace tpp
