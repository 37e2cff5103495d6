//! Central finite-difference gradient checks for every layer and for the
//! full classification graphs, at reduced sizes.

mod common;

#[test]
fn linear_layer_gradients() {
    for seed in 0..20 {
        common::gradcheck_linear(seed);
    }
}

#[test]
fn softmax_cross_entropy_gradients() {
    for seed in 0..20 {
        common::gradcheck_softmax_xent(seed);
    }
}

#[test]
fn lstm_cell_gradients() {
    for seed in 0..20 {
        common::gradcheck_lstm_cell(seed);
    }
}

#[test]
fn bilstm_gradients() {
    for seed in 0..20 {
        common::gradcheck_bilstm(seed);
    }
}

#[test]
fn self_attention_gradients() {
    for seed in 0..20 {
        common::gradcheck_attention(seed);
    }
}

#[test]
fn full_graph_gradients() {
    for seed in 0..10 {
        common::gradcheck_full_graphs(seed);
    }
}
