// one-off verification driver; removed before finalizing
use boundary_geometry::levelset::{extract_surface_3d, sample_grid, GridSpec};
use boundary_geometry::network::MlpNetwork;
use boundary_geometry::pipeline::{gen_spheres_dataset, LabeledDataset};
use boundary_geometry::topology::euler_characteristic;

fn main() {
    let net = MlpNetwork::load("/tmp/exp/model_full.json").unwrap();
    let data: LabeledDataset = gen_spheres_dataset(600, (1.0, 2.0), 1).unwrap();
    let spec = GridSpec::around_points(&data.points, 0.02, 0.25).unwrap();
    eprintln!("bounds {:?}", spec.bounds);
    let grid = sample_grid(&net, &spec).unwrap();
    let mesh = extract_surface_3d(&net, &grid).unwrap();
    let report = euler_characteristic(&net, &mesh, 0.02).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
}
