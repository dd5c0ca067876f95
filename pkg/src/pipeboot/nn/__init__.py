from .layers import (Conv2d, FullyConnected, ReLU, conv2d_backward,
                     conv2d_forward, fc_backward, fc_forward, relu_backward,
                     relu_forward)
from .losses import mse_loss, softmax_xent
from .network import (FlopLedger, Network, build_skip_autoencoder,
                      build_target_classifier, count_flops, network_backward,
                      network_forward, network_run)
from .checkpoint import (load_network, network_from_bytes, network_to_bytes,
                         save_network)
from .train import SgdConfig, TrainLog, train

__all__ = [
    "Conv2d", "FullyConnected", "ReLU",
    "conv2d_forward", "conv2d_backward", "relu_forward", "relu_backward",
    "fc_forward", "fc_backward", "mse_loss", "softmax_xent",
    "FlopLedger", "Network", "build_skip_autoencoder", "build_target_classifier",
    "count_flops", "network_forward", "network_run", "network_backward",
    "save_network", "load_network", "network_to_bytes", "network_from_bytes",
    "SgdConfig", "TrainLog", "train",
]
