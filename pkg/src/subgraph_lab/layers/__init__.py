from .baselines import (
    ds_core,
    ds_layer,
    dss_core,
    dss_layer,
    gnnak_block,
    gnnak_core,
    gnnak_ctx_block,
    idgnn_core,
    idgnn_layer,
    morris_core,
    morris_layer,
    ngnn_inner_core,
    ngnn_inner_layer,
)
from .core import BagCtx, bag_with_features, grid_from_bag, make_ctx
from .model import Model, build_model, model_forward, model_forward_bag
from .reign import LayerSpec, PoolingSpec, ReignTerm, ign2_layer, reign2_core, reign2_layer
from .sun import sun_core, sun_layer
from .transpile import (
    BASELINES,
    LayerStack,
    StackLayer,
    reign_stack_from_sun,
    reign_weights_from,
    sun_weights_from,
)
