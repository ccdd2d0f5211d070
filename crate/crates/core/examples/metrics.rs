use statlab::metrics::{evaluate, smape};

fn main() {
    let train = [10.0, 12.0, 11.0, 13.0, 12.0, 14.0];
    let actual = [15.0, 14.0, 16.0];
    let predicted = [14.0, 14.5, 15.0];
    let m = evaluate(&actual, &predicted, &train).unwrap();
    println!("sMAPE {:.4}  RMSE {:.4}  MAE {:.4}  MASE {:?}", m.smape, m.rmse, m.mae, m.mase);
    // both zero counts as a perfect point
    println!("zeros: {}", smape(&[0.0, 1.0], &[0.0, 1.0]).unwrap());
}
